"""Smoke test for the fano12 extension module.

Build and install it first:
    pip install --no-build-isolation -e crates/py
"""

import fano12


def main():
    ledger = fano12.enumerate_links()
    rows = ledger.realized()
    assert [r["label"] for r in rows] == ["I", "II", "III", "IV"], rows
    assert rows[1]["right"]["deg_delta"] == 3
    ledger.revalidate()
    again = fano12.LinkLedger.from_json(ledger.to_json())
    assert again.to_tsv() == ledger.to_tsv()

    report = fano12.solve_e5(1)
    assert report.status == "no_solutions"
    report.verify()
    report, fiber = fano12.solve_cd(0)
    assert fiber == "5" and ("1/2", "1/2") in report.points()

    form = fano12.QuadraticForm("1", "0", "-2", "0")
    assert form.solve().status == "solutions"  # only the origin
    assert form.solve().points() == [("0", "0")]
    pell = fano12.QuadraticForm("1", "0", "-3", "2")
    assert pell.solve().status == "no_solutions"

    assert fano12.prop24_certify()["bound"] == 9
    assert fano12.le10_certify()["bound"] == 10
    verdict = fano12.main_theorem_verdict()
    assert verdict["higher_rank"] == {"status": "contradiction", "lower": 11, "upper": 10}

    assert fano12.curve_blowup_kcube(4, 1, 5, 0) == "22"
    assert fano12.projbundle_monomials(0, 4) == ["-4", "0", "1", "0"]
    assert fano12.castelnuovo_bound(5, 3) == 2

    cubic = fano12.DPLattice(3)
    assert len(cubic.exceptional_classes()) == 27
    assert cubic.show([2, -1, 0, 0, 0, 0, 0]) == "2h-e1"
    assert fano12.construction_check("V5")["anti_degree"] == 4
    print("fano12 smoke test: ok")


if __name__ == "__main__":
    main()
