import io
import math

import numpy as np
import pytest

from sectionreg.chain import Registration, RigidTransform2, SectionChain
from sectionreg.pipeline import nsrr_solve
from sectionreg.synthetic import (
    SWEEP_HEADER,
    GroundTruthChain,
    NoiseSpec,
    chain_diameter,
    diameter,
    epe,
    fish_outline,
    generate,
    mse,
    noise_sweep,
    write_sweep_csv,
)


def test_fish_outline_shape():
    pts = fish_outline(400)
    assert pts.shape == (400, 2)
    assert np.ptp(pts[:, 0]) == pytest.approx(800.0)
    assert np.all(pts > 0)


def test_noiseless_round_trip():
    gt = generate(6, 15)
    for pair, s in zip(gt.chain.pairs, gt.shared_sets):
        i = pair.index - 1
        np.testing.assert_allclose(gt.true_transforms[i].inverse().apply(pair.forward), s, atol=1e-12)
        np.testing.assert_allclose(gt.true_transforms[i + 1].inverse().apply(pair.backward), s, atol=1e-12)
    assert gt.true_transforms[0].is_identity() and gt.true_transforms[-1].is_identity()


def test_eight_section_fish_chain():
    gt = generate(8, 20, noise=NoiseSpec(0.02, 1))
    assert gt.chain.n == 8 and len(gt.chain.pairs) == 7
    assert all(p.count == 20 for p in gt.chain.pairs)


def test_generation_is_seeded():
    a = generate(5, 10, noise=NoiseSpec(0.05, 7))
    b = generate(5, 10, noise=NoiseSpec(0.05, 7))
    c = generate(5, 10, noise=NoiseSpec(0.05, 8))
    assert a.chain == b.chain
    assert a.chain != c.chain


def test_noise_scales_with_coordinates():
    # two sections: both are unmoved, so observed = shared + noise
    base = np.full((2000, 2), 1000.0)
    gt = generate(2, 2000, base_shape=base, noise=NoiseSpec(0.01, 0))
    dev = gt.chain.pairs[0].forward - 1000.0
    assert np.std(dev) == pytest.approx(10.0, rel=0.05)
    assert abs(np.mean(dev)) < 1.0


def test_generate_rejects_bad_counts():
    with pytest.raises(ValueError):
        generate(1, 5)
    with pytest.raises(ValueError):
        generate(4, 0)
    with pytest.raises(ValueError):
        generate(4, 10, base_shape=np.zeros((5, 2)))
    with pytest.raises(ValueError):
        NoiseSpec(-0.1)


def test_mse_examples():
    gt = generate(5, 10)
    assert mse(gt.registration(), gt) < 1e-20
    shifted = [RigidTransform2(t.rotation, t.translation + [3.0, 4.0]) for t in gt.registration()]
    assert mse(shifted, gt) == pytest.approx(25.0, rel=1e-9)
    with pytest.raises(ValueError):
        mse(Registration.identity(3), gt)


def test_mse_matches_naive_loop():
    gt = generate(6, 12, noise=NoiseSpec(0.03, 5))
    reg, _ = nsrr_solve(gt.chain)
    total, count = 0.0, 0
    for pair, s in zip(gt.chain.pairs, gt.shared_sets):
        i = pair.index - 1
        for x, y, p in zip(pair.forward, pair.backward, s):
            for t, q in ((reg[i], x), (reg[i + 1], y)):
                d = t.rotation @ q + t.translation - p
                total += d[0] ** 2 + d[1] ** 2
                count += 1
    assert mse(reg, gt) == pytest.approx(total / count, rel=1e-12)


def test_epe_examples():
    pts = np.array([[1.0, 2.0], [4.0, 0.0]])
    aligned = SectionChain.from_arrays([pts, pts], [pts, pts])
    assert epe(aligned, Registration.identity(3)) == 0.0
    single = SectionChain.from_arrays([[[3.0, 4.0]]], [[[0.0, 0.0]]])
    assert epe(single, Registration.identity(2)) == 5.0

    gt = generate(5, 9, noise=NoiseSpec(0.05, 2))
    reg, _ = nsrr_solve(gt.chain)
    dists = []
    for pair in gt.chain.pairs:
        i = pair.index - 1
        for x, y in zip(pair.forward, pair.backward):
            d = reg[i].rotation @ x + reg[i].translation - reg[i + 1].rotation @ y - reg[i + 1].translation
            dists.append(math.hypot(*d))
    assert epe(gt.chain, reg) == pytest.approx(sum(dists) / len(dists), rel=1e-12)
    with pytest.raises(ValueError):
        epe(gt.chain, Registration.identity(2))


def test_metrics_invariant_under_consistent_relabelling():
    gt = generate(5, 12, noise=NoiseSpec(0.05, 3))
    reg, _ = nsrr_solve(gt.chain)
    rng = np.random.default_rng(0)
    perms = [rng.permutation(p.count) for p in gt.chain.pairs]
    chain = SectionChain.from_arrays(
        [p.forward[q] for p, q in zip(gt.chain.pairs, perms)],
        [p.backward[q] for p, q in zip(gt.chain.pairs, perms)],
    )
    shuffled = GroundTruthChain(
        chain, gt.true_transforms, tuple(s[q] for s, q in zip(gt.shared_sets, perms)), gt.seed
    )
    assert epe(chain, reg) == pytest.approx(epe(gt.chain, reg), rel=1e-12)
    assert mse(reg, shuffled) == pytest.approx(mse(reg, gt), rel=1e-12)


def test_exact_recovery_at_zero_noise():
    for seed in range(5):
        gt = generate(8, 20, noise=NoiseSpec(0.0, seed))
        reg, _ = nsrr_solve(gt.chain)
        for est, true in zip(reg, gt.registration()):
            np.testing.assert_allclose(est.rotation, true.rotation, atol=1e-9)
            np.testing.assert_allclose(est.translation, true.translation, atol=1e-9)


def test_noise_sweep_rows_and_determinism():
    rows = noise_sweep([0.0, 0.05], trials=3, seed=4)
    assert [r.noise_ratio for r in rows] == [0.0, 0.05]
    diam = diameter(fish_outline())
    assert rows[0].mean_mse < 1e-18 * diam**2
    for r in rows:
        assert r.mean_mse <= r.mean_mse_unregistered
    again = noise_sweep([0.0, 0.05], trials=3, seed=4)
    assert rows == again

    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert float(lines[2].split(",")[1]) == rows[1].mean_mse


def test_chain_diameter_bounds_true_diameter():
    gt = generate(4, 10)
    pts = gt.chain.all_points()
    d = diameter(pts)
    assert d <= chain_diameter(gt.chain) <= d * math.sqrt(2) + 1e-9
