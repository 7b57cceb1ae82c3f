# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The wavecnet Authors

import json
import math

import numpy as np
import pytest

import wavecnet


def test_registry():
    names = wavecnet.wavelet_names()
    assert len(names) == 10
    assert "haar" in names
    haar = wavecnet.get_wavelet("haar")
    assert haar["analysis_low"] == pytest.approx([1 / math.sqrt(2)] * 2)
    for name in names:
        checks = wavecnet.validate_filterbank(name)
        assert all(passed for passed, _ in checks.values()), name


def test_unknown_wavelet_raises():
    with pytest.raises(ValueError, match="UnknownWavelet"):
        wavecnet.get_wavelet("db42")


def test_haar_round_trip():
    rng = np.random.default_rng(0)
    x = rng.random((12, 10))
    ll, lh, hl, hh = wavecnet.dwt2d(x, "haar")
    assert ll.shape == (6, 5)
    y = wavecnet.idwt2d(ll, lh, hl, hh, 12, 10, "haar")
    assert np.max(np.abs(y - x)) < 1e-12


def test_haar_ll_is_block_average():
    x = np.arange(16, dtype=float).reshape(4, 4)
    ll, _, _, _ = wavecnet.dwt2d(x)
    blocks = x.reshape(2, 2, 2, 2).swapaxes(1, 2).sum(axis=(2, 3)) / 2
    assert np.allclose(ll, blocks)


def test_soft_shrink_and_denoise():
    assert wavecnet.soft_shrink(0.5, 0.1) == pytest.approx(0.4)
    assert wavecnet.soft_shrink(-0.05, 0.1) == 0.0
    img = np.full((8, 8), 0.25)
    assert np.allclose(wavecnet.denoise_image(img), img)


def test_madds():
    assert wavecnet.dwt2d_madds(2, 2, 1) == 36
    assert wavecnet.idwt2d_madds(2, 2, 1) == 39
    report = json.loads(wavecnet.model_madds('{"architecture": "wavecnet-mini", "downsample": "dwt_ll:haar"}',
                                             [1, 28, 28]))
    assert 0 < report["ratio"] < 100


def test_metrics():
    ref = [0.2, 0.3, 0.4, 0.5, 0.6]
    assert wavecnet.corruption_error(ref, ref) == 100.0
    ces = {"gaussian_noise": 87.15, "shot_noise": 88.47, "impulse_noise": 91.30}
    assert round(wavecnet.mean_ce(ces, "noise"), 2) == 88.97
    with pytest.raises(ValueError, match="MissingCorruption"):
        wavecnet.mean_ce({"gaussian_noise": 1.0}, "noise")


def test_corrupt_is_seeded():
    x = np.full((2, 1, 8, 8), 0.5)
    a = wavecnet.corrupt(x, "gaussian_noise", 3, seed=1)
    b = wavecnet.corrupt(x, "gaussian_noise", 3, seed=1)
    c = wavecnet.corrupt(x, "gaussian_noise", 3, seed=2)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 0 and a.max() <= 1


def test_tensor_file_round_trip(tmp_path):
    x = np.random.default_rng(3).normal(size=(2, 3, 4))
    path = str(tmp_path / "x.wtn")
    wavecnet.write_tensor(path, x)
    assert np.array_equal(wavecnet.read_tensor(path), x)
    with pytest.raises(OSError):
        wavecnet.read_tensor(str(tmp_path / "missing.wtn"))


def test_cli():
    code, out, err = wavecnet.run_cli(["filters", "--wavelet", "haar"])
    assert code == 0
    assert len(out.strip().splitlines()) == 3
    code, _, err = wavecnet.run_cli(["filters"])
    assert code == 1
    assert err
