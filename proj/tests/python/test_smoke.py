"""Smoke tests for the kquad python bindings."""

import math

import numpy as np
import pytest

import kquad


def test_korobov_kernel_values():
    diag = 1.0 + math.pi**2 / 3.0
    assert kquad.korobov_eval_1d(1, 0.25, 0.25) == pytest.approx(diag, rel=1e-14)
    assert kquad.korobov_eval_1d(1, 0.0, 0.5) == pytest.approx(
        1.0 - math.pi**2 / 6.0, rel=1e-14
    )
    kernel = kquad.KorobovKernel(alpha=1, dim=2)
    assert kquad.kernel_eval(kernel, [0.2, 0.9], [0.2, 0.9]) == pytest.approx(
        diag * diag, rel=1e-13
    )


def test_bernoulli_and_mercer():
    assert kquad.bernoulli_poly(2, 0.0) == pytest.approx(1.0 / 6.0)
    bound = kquad.mercer_tail_bound(1, 1.0, 10000) + 1e-9
    diff = abs(
        kquad.mercer_truncated(1, 1.0, 10000, 0.3, 0.8)
        - kquad.korobov_eval_1d(1, 0.3, 0.8)
    )
    assert diff <= bound
    with pytest.raises(Exception):
        kquad.mercer_truncated(1, 0.5, 100, 0.1, 0.2)  # 2*alpha*theta <= 1


def test_matern_kernel():
    kernel = kquad.MaternKernel(r=2, dim=1)
    assert kernel.nu == pytest.approx(1.5)
    assert kquad.kernel_eval(kernel, [0.3], [0.3]) == 1.0
    mean = kquad.kernel_mean_numeric(kquad.MaternKernel(1, 1), [0.0], resolution=4096)
    assert mean == pytest.approx(1.0 - math.exp(-1.0), abs=1e-6)
    with pytest.raises(Exception):
        kquad.MaternKernel(r=1, dim=2)  # nu = 0 unsupported


def test_point_sets():
    pts = kquad.sample_iid_uniform(100, 2, seed=7)
    assert pts.shape == (100, 2)
    assert np.all((pts >= 0.0) & (pts < 1.0))
    assert np.array_equal(pts, kquad.sample_iid_uniform(100, 2, seed=7))

    gen = kquad.GeneratorVector(5, 1, [2])
    lattice = kquad.rank1_lattice(gen)
    assert lattice[:, 0].tolist() == [0.4, 0.8, 0.2, 0.6, 0.0]

    grid = kquad.regular_grid(4, 1)
    assert kquad.separation_radius(grid) == 0.25
    assert kquad.diameter(grid) == pytest.approx(0.75)

    shifted = kquad.random_shift(lattice, seed=3)
    assert shifted.shape == lattice.shape


def test_cbc_and_generator_io(tmp_path):
    gen = kquad.cbc_construct(13, 2, 2)
    assert gen.n == 13
    assert all(1 <= z <= 12 for z in gen.z)
    path = tmp_path / "gen.txt"
    kquad.save_generator(gen, path)
    loaded = kquad.load_generator(path)
    assert loaded.z == gen.z
    assert path.read_text().splitlines()[0] == "13 2 2"


def test_wce_and_weights():
    lattice = kquad.rank1_lattice(kquad.GeneratorVector(2, 1, [1]))
    kernel = kquad.KorobovKernel(1, 1)
    uniform = np.asarray(kquad.uniform_weights(2))
    report = kquad.wce_eval(kernel, lattice, uniform)
    assert report.initial_sq == 1.0
    assert report.e == pytest.approx(math.pi / math.sqrt(12.0), rel=1e-12)
    assert kquad.wce_bruteforce(kernel, lattice, uniform) == pytest.approx(
        report.e, rel=1e-10
    )

    gram = kquad.gram_matrix(kernel, lattice)
    solve = kquad.bq_weights_exact(gram, np.ones(2))
    improved = kquad.wce_eval(kernel, lattice, np.asarray(solve.weights))
    assert improved.e < report.e
    assert solve.weight_sq_norm == pytest.approx(
        sum(w * w for w in solve.weights), rel=1e-12
    )

    constrained = kquad.bq_weights_constrained(gram, np.ones(2), 1e-6)
    assert constrained.weight_sq_norm <= 1e-6 * (1.0 + 1e-6)


def test_convergence_and_fit(tmp_path):
    records = kquad.run_convergence(
        "mc", alpha=2, s=2, d=1, j_min=4, j_max=6, replicates=3, seed=11
    )
    assert len(records) == 9
    assert {rec.n for rec in records} == {16, 32, 64}
    fit = kquad.aggregate_and_fit(records, n_min=16)
    assert fit.points_used == 3
    assert -2.0 < fit.slope < 0.5  # smoke-level sanity only

    path = tmp_path / "records.csv"
    kquad.export_table(records, path)
    back = kquad.import_table(path)
    assert len(back) == len(records)
    assert back[0].method == "mc"
    assert [r.abs_error for r in back] == [r.abs_error for r in records]


def test_predicted_rates():
    assert kquad.predicted_rate(3.0, 0.5, 2.0 / 3.0) == pytest.approx(2.0)
    assert kquad.predicted_rate(2.5, 0.25, 1.0) == 2.5
    assert kquad.predicted_rate_sobolev(2.0, 0.5, 2, 4) == 1.0
    with pytest.raises(Exception):
        kquad.predicted_rate_sobolev(2.0, 0.5, 5, 4)


def test_conditioning_error_is_exposed():
    gram = np.array([[1.0, 4.0], [4.0, 1.0]])  # indefinite
    with pytest.raises(kquad.ConditioningError):
        kquad.bq_weights_exact(gram, np.ones(2))
