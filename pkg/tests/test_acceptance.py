"""End-to-end acceptance gates for the package's shipped guarantees.

Each test exercises one guarantee at its stated tolerance and prints a
single PASS/FAIL line (run ``pytest tests/test_acceptance.py -v -s`` to see
them).  Timing limits are asserted alongside the numerical checks.
"""

import time

import numpy as np

from ipd_learning import (
    JointStrategy,
    LearningSpeeds,
    OutOfStrategyBox,
    PayoffMatrix,
    classify_interior,
    classify_trajectory,
    equilibrium,
    integrate,
    manifold_point,
    most_exploitative,
    payoff_gap_1,
    payoff_gap_series,
    stability_region,
    stationary_distribution,
    tft_monotonicity_check,
    validate_payoff,
    vector_field,
)
from ipd_learning.cli import main
from ipd_learning.game import equilibrium_values


def _report(ok: bool, label: str):
    print(("PASS " if ok else "FAIL ") + label)
    assert ok, label


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_extreme_point_exact(standard):
    expect = (0.25, 2.0 / 3.0, 3.25, 7.0 / 6.0)
    most_exploitative(standard)  # warm caches before timing
    best = min(_timed(lambda: most_exploitative(standard))[1]
               for _ in range(3))
    got = most_exploitative(standard)
    err = max(abs(g - e) for g, e in zip(got, expect))
    ok = err <= 1e-12 and best < 1e-3
    _report(ok, f"criterion 1: extreme exploitation point exact "
                f"(max err {err:.2e}, {best * 1e6:.0f} us)")


def test_criterion_02_oracle_equivalence(standard):
    rng = np.random.default_rng(2024)

    def run():
        worst_eq = 0.0
        worst_gap = 0.0
        for _ in range(1000):
            s = JointStrategy(*rng.uniform(0.1, 0.9, size=4))
            eq = equilibrium(standard, s)
            p_star = stationary_distribution(s)
            worst_eq = max(worst_eq,
                           abs(eq.x_e - (p_star[0] + p_star[1])),
                           abs(eq.y_e - (p_star[0] + p_star[2])),
                           float(np.max(np.abs(eq.p_e - p_star))))
            series = payoff_gap_series(standard, s, horizon=200)
            worst_gap = max(worst_gap, abs(payoff_gap_1(standard, s) - series))
        return worst_eq, worst_gap

    (worst_eq, worst_gap), elapsed = _timed(run)
    ok = worst_eq <= 1e-9 and worst_gap <= 1e-9 and elapsed < 1.0
    _report(ok, f"criterion 2: 1000 random pairs, stationary-law oracle "
                f"err {worst_eq:.2e}, series-gap err {worst_gap:.2e} "
                f"({elapsed:.2f} s)")


def test_criterion_03_gradient_form(standard):
    rng = np.random.default_rng(77)
    h = 1e-6

    def run():
        worst = 0.0
        for _ in range(1000):
            vals = rng.uniform(0.05, 0.95, size=4)
            f = vector_field(standard, JointStrategy(*vals))
            for j in range(4):
                up, dn = vals.copy(), vals.copy()
                up[j] += h
                dn[j] -= h
                k = 2 if j < 2 else 3  # own payoff: u for player 1, v for 2
                grad = (equilibrium_values(standard, *up)[k]
                        - equilibrium_values(standard, *dn)[k]) / (2.0 * h)
                target = vals[j] * (1.0 - vals[j]) * grad
                scale = max(abs(f[j]), abs(target), 1e-4)
                worst = max(worst, abs(f[j] - target) / scale)
        return worst

    worst, elapsed = _timed(run)
    ok = worst <= 1e-5 and elapsed < 5.0
    _report(ok, f"criterion 3: field equals boundary factor times payoff "
                f"gradient, worst rel err {worst:.2e} ({elapsed:.2f} s)")


def test_criterion_04_manifold_residual_and_shape(standard):
    n = 50
    mids = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)

    def run():
        comp = np.full((4, n, n), np.nan)
        feas = np.zeros((n, n), dtype=bool)
        worst_field = 0.0
        min_punish = np.inf
        for i, xe in enumerate(mids):
            for j, ye in enumerate(mids):
                try:
                    loc = manifold_point(standard, xe, ye)
                except OutOfStrategyBox:
                    continue
                feas[i, j] = True
                comp[:, i, j] = loc.as_array()
                worst_field = max(worst_field, float(np.max(np.abs(
                    vector_field(standard, loc)))))
                min_punish = min(min_punish, loc.x_c - loc.x_d,
                                 loc.y_c - loc.y_d)
        return comp, feas, worst_field, min_punish

    (comp, feas, worst_field, min_punish), elapsed = _timed(run)
    n_feas = int(feas.sum())

    # monotone response of the rest-point pair to the stationary rates:
    # own rate raises both own components, the opponent's rate lowers them
    along_x = feas[:-1, :] & feas[1:, :]
    along_y = feas[:, :-1] & feas[:, 1:]
    signs_ok = True
    for c in (0, 1):  # player 1's components against x_e (+) and y_e (-)
        signs_ok &= bool(np.all((comp[c, 1:, :] - comp[c, :-1, :])[along_x] > 0))
        signs_ok &= bool(np.all((comp[c, :, 1:] - comp[c, :, :-1])[along_y] < 0))
    for c in (2, 3):  # player 2's components against y_e (+) and x_e (-)
        signs_ok &= bool(np.all((comp[c, :, 1:] - comp[c, :, :-1])[along_y] > 0))
        signs_ok &= bool(np.all((comp[c, 1:, :] - comp[c, :-1, :])[along_x] < 0))

    ok = (n_feas > 100 and worst_field < 1e-10 and min_punish > 0.0
          and signs_ok and elapsed < 5.0)
    _report(ok, f"criterion 4: {n_feas} feasible rest points, field residual "
                f"{worst_field:.2e}, punishment gap >= {min_punish:.3f}, "
                f"monotone shape {'holds' if signs_ok else 'violated'} "
                f"({elapsed:.2f} s)")


def test_criterion_05_stability_region_structure():
    cases = ((2.5, True), (3.0, True), (3.5, True), (3.999, True),
             (4.001, False), (5.0, False))

    def run():
        counts = {}
        structure_ok = True
        for r_val, expect_stable in cases:
            if 2.0 * r_val > 5.0 and r_val < 5.0:
                pay = validate_payoff(5.0, r_val, 1.0, 0.0)
            else:
                # R = 2.5 and R = 5.0 sit exactly on the dilemma's boundary
                # inequalities; the rest-point study is still well defined
                # there, so the checked constructor is deliberately bypassed
                pay = PayoffMatrix(5.0, r_val, 1.0, 0.0)
            smap = stability_region(pay, 50)
            counts[r_val] = (smap.n_stable, int(smap.feasible.sum()),
                             sum(row.count("ambiguous") for row in smap.status))
            structure_ok &= bool(np.all(smap.n_zero[smap.feasible] == 2))
            structure_ok &= (smap.n_stable > 0) == expect_stable
        return counts, structure_ok

    (counts, structure_ok), elapsed = _timed(run)
    summary = " ".join(f"R={r}:{s}/{f}" for r, (s, f, _) in counts.items())
    ambiguous = sum(a for _, _, a in counts.values())
    ok = structure_ok and elapsed < 60.0
    _report(ok, f"criterion 5: stable/feasible cells {summary}, "
                f"{ambiguous} ambiguous ({elapsed:.1f} s)")


def test_criterion_06_attractor_purity_vs_asymmetry(standard, high_reward):
    from ipd_learning import grid4d_map

    def run():
        pure = grid4d_map(high_reward, 4)
        mixed = grid4d_map(standard, 4)
        return pure, mixed

    (pure, mixed), elapsed = _timed(run)
    only_pure = set(pure.terminal) <= {"PureCC", "PureDD"}
    interior = [i for i, t in enumerate(mixed.terminal) if t == "Interior"]
    strong = interior and float(np.max(np.abs(
        mixed.exploitation[interior]))) > 0.05
    ok = only_pure and bool(strong) and elapsed < 600.0
    _report(ok, f"criterion 6: 256-start lattice, high reward all pure "
                f"({'yes' if only_pure else 'no'}), standard reward "
                f"{len(interior)} interior cells with max asymmetry "
                f"{float(np.max(np.abs(mixed.exploitation[interior]))) if interior else 0:.3f} "
                f"({elapsed:.1f} s)")


def test_criterion_07_trajectory_cases():
    pay = validate_payoff(5.0, 3.25, 1.0, 0.0)

    def run():
        got = {}
        for y_d, expect in ((0.1, "Case1"), (0.25, "Case2"),
                            (0.65, "Case3"), (0.7, "Case4")):
            rec = integrate(pay, JointStrategy(0.9, 0.1, 0.9, y_d))
            got[y_d] = (rec.case_label, classify_trajectory(rec),
                        rec.eq_track[-1])
        return got

    got, elapsed = _timed(run)
    labels_ok = all(got[y][0] == expect and got[y][1] == expect
                    for y, expect in ((0.1, "Case1"), (0.25, "Case2"),
                                      (0.65, "Case3"), (0.7, "Case4")))
    # in Case2 player 1 ends up the exploiter: cooperating less and
    # earning more; Case4 is the mirror image
    xe2, ye2, ue2, ve2 = got[0.25][2]
    xe4, ye4, ue4, ve4 = got[0.7][2]
    direction_ok = (xe2 < ye2 and ue2 > ve2 and xe4 > ye4 and ue4 < ve4)
    ok = labels_ok and direction_ok and elapsed < 60.0
    _report(ok, f"criterion 7: four qualitative trajectory cases with "
                f"exploitation directions Case2 (u={ue2:.2f}>v={ve2:.2f}), "
                f"Case4 (u={ue4:.2f}<v={ve4:.2f}) ({elapsed:.1f} s)")


def test_criterion_08_tft_monotone_basin(high_reward):
    rep, elapsed = _timed(lambda: tft_monotonicity_check(
        high_reward, (0.8, 0.2), 100, seed=0))
    ok = rep.n_violations == 0 and elapsed < 300.0
    _report(ok, f"criterion 8: {rep.n_violations} violations over "
                f"{rep.n_samples} cooperating starts "
                f"({rep.n_attempts} attempts, {elapsed:.1f} s)")


def test_criterion_09_learning_speed_invariance(standard):
    def run():
        base = stability_region(standard, 50)
        skew = stability_region(standard, 50, speeds=LearningSpeeds(3, 3, 1, 1))
        partition_ok = (np.array_equal(base.feasible, skew.feasible)
                        and np.array_equal(base.stable, skew.stable))
        extreme_ok = True
        for ratio in (3.0, 10.0, 30.0):
            for speeds in (LearningSpeeds(ratio, ratio, 1, 1),
                           LearningSpeeds(1, 1, ratio, ratio)):
                rep = classify_interior(standard, 0.25, 2.0 / 3.0, speeds)
                extreme_ok &= rep.stable
        return partition_ok, extreme_ok

    (partition_ok, extreme_ok), elapsed = _timed(run)
    ok = partition_ok and extreme_ok and elapsed < 120.0
    _report(ok, f"criterion 9: stability partition speed-invariant "
                f"({'yes' if partition_ok else 'no'}), extreme point stable "
                f"up to speed ratio 30 ({'yes' if extreme_ok else 'no'}) "
                f"({elapsed:.1f} s)")


def test_criterion_10_manifest_replay_determinism(tmp_path, capsys):
    runs = [
        ("t.csv", ["trajectory", "--payoff", "5,3,1,0",
                   "--init", "0.9,0.5,0.6,0.4", "--t-max", "500"]),
        ("b.csv", ["basin", "--payoff", "5,4.5,1,0",
                   "--axis1", "x_C:0.2:0.8:2", "--axis2", "x_D:0.1:0.3:2",
                   "--fixed", "y_C=0.8,y_D=0.2", "--t-max", "2000"]),
        ("s.csv", ["fixed-points", "--payoff", "5,3,1,0", "--grid-n", "8"]),
    ]
    identical = True
    for name, argv in runs:
        out = tmp_path / name
        assert main(argv + ["--output", str(out), "--no-figure"]) == 0
        replay_dir = tmp_path / ("replay_" + name.split(".")[0])
        manifest = tmp_path / (name.split(".")[0] + ".manifest.json")
        assert main(["--manifest", str(manifest),
                     "--output-dir", str(replay_dir)]) == 0
        identical &= out.read_bytes() == (replay_dir / name).read_bytes()
    capsys.readouterr()
    _report(identical, "criterion 10: manifest replays reproduce all three "
                       "report CSVs byte for byte")
