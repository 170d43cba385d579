import math

from pcapvis_trainer.lr_finder import lr_find


def test_sweep_rates_strictly_increase(toy_manifest, fast_config):
    result = lr_find(toy_manifest, fast_config())
    assert len(result.rates) == len(result.losses) >= 4
    assert all(a < b for a, b in zip(result.rates, result.rates[1:]))
    assert all(math.isfinite(l) for l in result.losses)


def test_suggestion_is_positive_finite(toy_manifest, fast_config):
    result = lr_find(toy_manifest, fast_config())
    assert math.isfinite(result.suggestion)
    assert result.suggestion > 0
    assert result.rates[0] <= result.suggestion <= result.rates[-1]
