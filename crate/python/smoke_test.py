#!/usr/bin/env python3
"""Smoke test for the baryolson_py extension module.

Builds the extension with cargo, loads it, and exercises the main types and
operations end to end. Run from anywhere inside the repository:

    python3 python/smoke_test.py
"""

import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension(tmp: Path) -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "baryolson-python"],
        cwd=REPO,
        check=True,
    )
    built = REPO / "target" / "release" / "libbaryolson_py.so"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    target = tmp / f"baryolson_py{suffix}"
    shutil.copy2(built, target)
    return target


def main() -> int:
    tmp = Path(tempfile.mkdtemp(prefix="baryolson-py-"))
    build_extension(tmp)
    sys.path.insert(0, str(tmp))
    import baryolson_py as bo  # noqa: E402

    checks = 0

    def check(condition, label):
        nonlocal checks
        if not condition:
            print(f"FAIL {label}")
            sys.exit(1)
        checks += 1
        print(f"ok   {label}")

    # group arithmetic
    z7 = bo.Group("7")
    check(z7.order == 7 and z7.rank == 1 and z7.is_cyclic, "Group('7') basics")
    g24 = bo.Group([2, 4])
    check(g24.add([1, 3], [1, 3]) == [0, 2], "coordinatewise addition")
    check(g24.scalar_mul(-2, [1, 1]) == [0, 2], "scalar multiple with negative t")
    check(bo.Group("4").sigma_group() == 2, "order-2 element of Z/4")
    check(g24.p_rank(2) == 2, "2-rank of Z/2 x Z/4")
    check(bo.mult_order(2, 11) == 10, "multiplicative order")
    check(
        [g.invariant_factors for g in bo.enumerate_groups(8)]
        == [[8], [2, 4], [2, 2, 2]],
        "isomorphism classes of order 8",
    )

    # barycentric predicates
    check(bo.is_barycentric(z7, [0, 1, 2]), "arithmetic progression is barycentric")
    check(not bo.is_barycentric(z7, [0, 1, 3]), "{0,1,3} is not barycentric")
    check(
        bo.has_k_barycentric_subset(z7, [0, 1, 2, 3, 4], 3),
        "subset search finds a 3-term progression",
    )
    witness = bo.find_k_barycentric_subset(z7, [0, 1, 2, 3, 4], 3)
    check(witness is not None and len(witness) == 3, "subset witness extraction")
    check(sorted(bo.sigma_k(z7, [1, 2, 3], 2)) == [3, 4, 5], "pairwise sums")

    # the exact solver against known values
    check(bo.bo(z7, 4)["value"] == 5, "BO(4, Z/7) = 5")
    check(bo.bo(z7, 3)["value"] == 4, "BO(3, Z/7) = 4")
    result = bo.bo(bo.Group("11"), 5, workers=2)
    check(result["value"] == 7, "BO(5, Z/11) = 7")
    check(
        not bo.has_k_barycentric_subset(bo.Group("11"), result["witness"], 5),
        "solver witness re-verifies",
    )
    check(bo.bo_corner(bo.Group("9"), 7) == 7, "corner value at k = |G|-2")
    report = bo.bound_report(bo.Group("13"), 5)
    check(report["exact"] is None and (6, "UBpol") in report["lower_bounds"],
          "bound report for Z/13, k=5")

    # constructions
    check(bo.lb_witness(11, 4)["elements"] == [0, 1, 2, 3], "interval witness")
    th8 = bo.th8_witness(11)
    check(th8["elements"] == [0, 1, 3, 4, 5, 9] and th8["verified"],
          "coset witness at p=11")
    shell = bo.behrend_witness(1000, 3, m=2)
    check(
        shell["params"]["r"] == 25 and shell["elements"] == [5, 55, 71, 85],
        "digit-shell witness for n=1000, k=3, m=2",
    )
    check(bo.behrend_d(1000, 3, 2) == 9, "digit parameter")
    check(bo.behrend_bound(1000, 3) >= 0.5, "digit-shell bound")

    # the coefficient identity
    check(bo.chi(3, 2, 1, 2) == 4, "chi(2,1,2) at k=3")
    check(
        all(
            bo.chi(k, c1, c2, c3) == bo.chi_direct(k, c1, c2, c3)
            for k in (2, 5, 11)
            for c1 in range(5)
            for c2 in range(5)
            for c3 in range(5)
        ),
        "closed form equals trinomial expansion",
    )
    check(bo.chi_mod_p(3, 2, 1, 2, 7) == 4, "chi mod p")

    # theorem-tagged formulas
    check(bo.w1_bounds(11, 4) == (4, 8), "interval bounds")
    check(bo.dsh_bound(7, 5, 2) == 7, "subset-sum floor")
    check(bo.proptech_value(7, 4) == 5, "coprime window value")
    check(bo.th8_value(11) == (5, 7), "threshold split value")
    check(bo.ubpol_bounds(13, 5) == (6, 7), "polynomial-method bounds")
    check(bo.sk_lemma_bound(11, 7, 5) == 11, "triple-sum floor")
    check(0 < bo.behrend_corollary_bound(10**6, 3) <= 10**6, "asymptotic reference")

    # error surfaces
    for bad in (
        lambda: bo.Group("4,2"),
        lambda: bo.mult_order(6, 9),
        lambda: bo.lb_witness(12, 4),
        lambda: bo.th8_witness(7),
        lambda: bo.s_k_set(bo.Group("10"), [0, 1, 2], 3),
    ):
        try:
            bad()
        except ValueError:
            checks += 1
        else:
            print("FAIL expected ValueError")
            sys.exit(1)
    print("ok   precondition violations raise ValueError")

    print(f"\nsmoke test passed: {checks} checks")
    return 0


if __name__ == "__main__":
    sys.exit(main())
