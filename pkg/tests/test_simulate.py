import numpy as np
import pytest
from scipy import stats

from specsep.errors import EigensolverFailure, NoGap
from specsep.privacy import SigmaSpec
from specsep.simulate import (
    EmpiricalSpectrum,
    SimConfig,
    asymptotic_law_cdf,
    debiasing_error,
    empirical_cdf,
    gap_violation_check,
    ks_distance,
    ks_statistic,
    mass_split,
    sample_spectrum,
    simulate,
    symmetric_eigvals,
    thread_count,
)
from specsep.spectral import AtomicDistribution, ToyModel, support

FIG = ToyModel(1 / 40, 0.3, 10.0)


def _cfg(**kw):
    base = dict(p=40, n=1600, sigma=SigmaSpec.toy(0.3, 10.0, 40), t=10.0, seed=11, trials=3)
    base.update(kw)
    return SimConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(p=41)
    with pytest.raises(ValueError):
        _cfg(entry_dist="cauchy")
    with pytest.raises(ValueError):
        _cfg(t=-1.0)
    with pytest.raises(ValueError):
        _cfg(seed=-1)
    with pytest.raises(ValueError):
        SimConfig(2000, 10, SigmaSpec((1.0,) * 2000))
    assert _cfg().c == pytest.approx(1 / 40)
    assert _cfg().as_dict()["sigma"][0] == 10.0


def test_same_seed_same_spectra_and_thread_independence():
    cfg = _cfg()
    a = simulate(cfg, threads=1)
    b = simulate(cfg, threads=3)
    for x, y in zip(a, b):
        assert np.array_equal(x.eigenvalues, y.eigenvalues)
    assert not np.array_equal(a[0].eigenvalues, a[1].eigenvalues)


def test_trial_stream_does_not_depend_on_trial_count():
    one = sample_spectrum(_cfg(trials=1), 0)
    many = simulate(_cfg(trials=4), threads=2)[0]
    assert np.array_equal(one.eigenvalues, many.eigenvalues)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("SPECSEP_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.delenv("SPECSEP_THREADS")
    assert thread_count() >= 1


def test_noise_free_rank():
    # without noise the sample covariance has rank floor(r p)
    spec = sample_spectrum(_cfg(t=0.0, trials=1), 0)
    assert np.count_nonzero(spec.eigenvalues > 1e-8) == 12
    assert np.all(spec.eigenvalues >= 0)


def test_rotation_preserves_spectrum_law():
    plain = np.concatenate([s.eigenvalues for s in simulate(_cfg(trials=4))])
    rotated = np.concatenate([s.eigenvalues for s in simulate(_cfg(trials=4, rotate=True))])
    assert stats.ks_2samp(plain, rotated).pvalue > 1e-3


@pytest.mark.parametrize("law", ["rademacher", "uniform"])
def test_entry_laws_are_standardized(law):
    spec = sample_spectrum(_cfg(entry_dist=law, noise_dist=law, trials=1, p=20, n=20000, sigma=SigmaSpec((1.0,) * 20), t=0.0), 0)
    # identity population: eigenvalues close to 1 at c = 1/1000
    assert np.all(np.abs(spec.eigenvalues - 1) < 0.15)


def test_symmetric_eigvals_checks_residual():
    a = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(symmetric_eigvals(a), [1, 2, 3])
    with pytest.raises(EigensolverFailure):
        symmetric_eigvals(np.array([[1.0, 5.0], [0.0, 1.0]]))


def test_ks_statistic_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=500)
    assert ks_statistic(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-12)
    with pytest.raises(ValueError):
        ks_statistic([], stats.norm.cdf)


def test_ks_statistic_handles_atoms():
    # half the samples at an atom of mass one half: distance zero at the atom
    x = np.r_[np.zeros(1000), np.linspace(0.0005, 1, 1000)]
    cdf = lambda u: np.where(u < 0, 0.0, 0.5 + 0.5 * np.clip(u, 0, 1))  # noqa: E731
    left = lambda u: np.where(u <= 0, 0.0, 0.5 + 0.5 * np.clip(u, 0, 1))  # noqa: E731
    assert ks_statistic(x, cdf, left) < 2e-3


def test_empirical_cdf():
    f = empirical_cdf([3.0, 1.0, 2.0])
    assert f([0.5, 1.0, 2.5, 3.0]).tolist() == [0.0, 1 / 3, 2 / 3, 1.0]


def test_asymptotic_cdf_for_general_law_requires_c():
    h = AtomicDistribution((0.5, 0.5), (1.0, 5.0))
    with pytest.raises(ValueError):
        asymptotic_law_cdf(h, 0.0)
    cdf, _ = asymptotic_law_cdf(h, 1.0, 0.05)
    assert cdf(100.0) == pytest.approx(1.0, abs=1e-6)


def test_ks_distance_small_for_toy_law():
    spectra = simulate(_cfg(p=100, n=4000, sigma=SigmaSpec.toy(0.3, 10.0, 100), trials=4))
    assert ks_distance(spectra, FIG, 10.0) < 0.05


def test_gap_check_counts_injected_eigenvalue():
    sup = support(FIG, 10.0)
    lo, hi = sup.continuous[0][1], sup.continuous[1][0]
    cfg = _cfg(trials=1)
    clean = EmpiricalSpectrum(np.array([8.0, 20.0]), cfg, 0)
    dirty = EmpiricalSpectrum(np.array([8.0, 0.5 * (lo + hi), 20.0]), cfg, 1)
    edge = EmpiricalSpectrum(np.array([lo + 0.01 * (hi - lo)]), cfg, 2)
    rep = gap_violation_check([clean, dirty, edge], sup, margin_frac=0.05)
    assert rep.counts == [0, 1, 0]
    assert rep.clean_trials == 2 and rep.total == 1
    with pytest.raises(ValueError):
        gap_violation_check([clean], sup, margin_frac=0.6)
    with pytest.raises(NoGap):
        gap_violation_check([clean], support(FIG, 30.0))


def test_mass_split():
    sup = support(FIG, 10.0)
    spec = EmpiricalSpectrum(np.array([8.0, 9.0, 10.0, 20.0]), _cfg(trials=1), 0)
    assert mass_split(spec, sup) == (0.75, 0.25)


def test_debiasing_error_decreases():
    curve = debiasing_error(SigmaSpec((1.0, 2.0, 3.0)), [100, 1000, 10000], t=1.0, seed=3, trials=10)
    assert np.all(np.diff(curve.errors) < 0)
    assert -1.3 <= curve.slope <= -0.7
