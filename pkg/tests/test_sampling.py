import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmdplan import ConfigurationError, MixtureComponent, NoiseSpec, WeightedSamples, draw_noise
from mmdplan.sampling import SeedStream


def test_degenerate_uniform_gives_zeros():
    spec = NoiseSpec(kind="uniform", sample_count=5, low=0.0, high=0.0)
    samples = draw_noise(spec, seed=3, dimension=1)
    assert np.all(samples.values == 0.0)
    assert np.allclose(samples.weights, 0.2)


def test_zero_variance_gaussian_gives_zeros():
    spec = NoiseSpec(kind="gaussian", sample_count=25, mean=0.0, spread=0.0)
    samples = draw_noise(spec, seed=11, dimension=1)
    assert samples.n == 25
    assert np.all(samples.values == 0.0)


def test_mixture_sample_mean_matches_analytic_mean():
    # Mixture mean is 0.5 * (-0.1) + 0.5 * 0.1 = 0; the law of large numbers
    # puts the sample mean of 10000 draws within 0.01.
    spec = NoiseSpec(
        kind="gaussian-mixture",
        sample_count=10_000,
        components=(
            MixtureComponent(mean=-0.1, spread=0.0, weight=0.5),
            MixtureComponent(mean=0.1, spread=0.0, weight=0.5),
        ),
    )
    samples = draw_noise(spec, seed=77, dimension=1)
    assert abs(float(np.mean(samples.values))) < 0.01


def test_draw_noise_is_pure_in_spec_and_seed():
    spec = NoiseSpec(kind="gaussian", sample_count=25, mean=[0.1, -0.2], spread=[1.0, 2.0])
    a = draw_noise(spec, seed=42, dimension=2)
    b = draw_noise(spec, seed=42, dimension=2)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.weights, b.weights)
    c = draw_noise(spec, seed=43, dimension=2)
    assert not np.array_equal(a.values, c.values)


@given(st.integers(min_value=1, max_value=200), st.integers(min_value=0, max_value=2**32))
def test_weights_always_uniform_and_normalized(n, seed):
    spec = NoiseSpec(kind="gaussian", sample_count=n, mean=0.0, spread=1.0)
    samples = draw_noise(spec, seed=seed, dimension=2)
    assert samples.values.shape == (n, 2)
    assert abs(samples.weights.sum() - 1.0) <= 1e-9
    assert np.allclose(samples.weights, 1.0 / n)


def test_mixture_weights_must_sum_to_one():
    with pytest.raises(ConfigurationError, match="components"):
        NoiseSpec(
            kind="gaussian-mixture",
            components=(
                MixtureComponent(weight=0.5),
                MixtureComponent(weight=0.6),
            ),
        )


def test_negative_mixture_weight_rejected():
    with pytest.raises(ConfigurationError, match="components"):
        NoiseSpec(
            kind="gaussian-mixture",
            components=(
                MixtureComponent(weight=-0.2),
                MixtureComponent(weight=1.2),
            ),
        )


def test_sample_count_must_be_positive():
    with pytest.raises(ConfigurationError, match="sample_count"):
        NoiseSpec(kind="gaussian", sample_count=0)


def test_unknown_kind_rejected():
    with pytest.raises(ConfigurationError, match="kind"):
        NoiseSpec(kind="pearson")


def test_external_samples_roundtrip(tmp_path):
    path = tmp_path / "noise.txt"
    rows = np.array([[0.1, -0.2], [0.3, 0.4], [-0.5, 0.6]])
    path.write_text("\n".join(f"{a} {b}" for a, b in rows) + "\n")
    spec = NoiseSpec(kind="external-samples", sample_count=3, path=str(path))
    samples = draw_noise(spec, seed=0, dimension=2)
    assert np.allclose(samples.values, rows)


def test_external_samples_too_few_rows(tmp_path):
    path = tmp_path / "noise.txt"
    path.write_text("0.0 0.0\n")
    spec = NoiseSpec(kind="external-samples", sample_count=5, path=str(path))
    with pytest.raises(ConfigurationError, match="path"):
        draw_noise(spec, seed=0, dimension=2)


def test_external_samples_requires_path():
    with pytest.raises(ConfigurationError, match="path"):
        NoiseSpec(kind="external-samples")


def test_weighted_samples_validation():
    with pytest.raises(ConfigurationError, match="weights"):
        WeightedSamples(values=np.array([1.0, 2.0]), weights=np.array([0.6, 0.6]))
    with pytest.raises(ConfigurationError, match="weights"):
        WeightedSamples(values=np.array([1.0, 2.0]), weights=np.array([1.5, -0.5]))
    with pytest.raises(ConfigurationError, match="weights"):
        WeightedSamples(values=np.array([1.0, 2.0]), weights=np.array([1.0]))


def test_seed_stream_is_deterministic():
    a = SeedStream(9)
    b = SeedStream(9)
    assert [a.next() for _ in range(5)] == [b.next() for _ in range(5)]
