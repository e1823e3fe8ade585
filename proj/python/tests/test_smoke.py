import math

import numpy as np
import pytest

import nstransfer as nst


def correlated(rng, d, n):
    a = rng.standard_normal((d, d))
    return np.linalg.cholesky(a @ a.T / d + 0.5 * np.eye(d)) @ rng.standard_normal((d, n))


def test_style_matrix_matches_numpy():
    z = np.random.default_rng(0).standard_normal((5, 40))
    sm = nst.style_matrix(z)
    assert sm.n == 40
    np.testing.assert_allclose(sm.cov, np.cov(z), atol=1e-12)
    np.testing.assert_allclose(sm.mean, z.mean(axis=1), atol=1e-14)


def test_eigen_descending_and_orthonormal():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((8, 8))
    s = a @ a.T
    values, vectors = nst.symmetric_eigen(s)
    assert np.all(np.diff(values) <= 0)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(8), atol=1e-10)
    np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, s, atol=1e-9)


def test_whitening_and_coloring():
    rng = np.random.default_rng(2)
    zx, zy = correlated(rng, 6, 500), correlated(rng, 6, 300) + 3.0
    sx, sy = nst.style_matrix(zx), nst.style_matrix(zy)
    w = nst.neutralize(sx, zx)
    np.testing.assert_allclose(np.cov(w), np.eye(6), atol=1e-8)
    np.testing.assert_allclose(np.cov(nst.stylize(sy, w)), sy.cov, atol=1e-8)
    np.testing.assert_allclose(nst.stylize(sx, w), zx, atol=1e-8)


def test_bleu_and_aggregate():
    assert nst.bleu(["the food was good"], ["the food was good"]) == pytest.approx(100.0)
    assert nst.bleu(["x y"], ["the food"]) == 0.0
    with pytest.raises(ValueError):
        nst.bleu([], [])
    r = nst.aggregate(80.33, 13.43)
    assert round(r["g_score"], 2) == 32.85
    assert round(r["mean"], 2) == 46.88
    assert r["g_score"] == pytest.approx(math.sqrt(80.33 * 13.43))


def test_mds_equilateral():
    p = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    q = nst.classical_mds(p)
    d = lambda x: np.linalg.norm(x[:, None] - x[None], axis=-1)
    np.testing.assert_allclose(d(q), d(p), atol=1e-8)
    with pytest.raises(ValueError):
        nst.classical_mds(p[:2])


def test_toygen_is_seeded():
    lines, labels = nst.toygen("product", 5, seed=3, attribute="tense")
    assert len(lines) == len(labels) == 40
    assert nst.toygen("product", 5, seed=3, attribute="tense") == (lines, labels)
    with pytest.raises(ValueError):
        nst.toygen("garden")


def test_train_and_transfer(tmp_path):
    lines, labels = nst.toygen("restaurant", 10, seed=4)
    corpus = tmp_path / "toy.tsv"
    corpus.write_text("".join(f"{y}\t{l}\n" for l, y in zip(lines, labels)))
    out = tmp_path / "model.bin"
    losses = nst.train([str(corpus)], str(out), overrides=["hidden_dim=8", "train.epochs=3"])
    assert len(losses) == 3
    model = nst.Model(str(out))
    assert model.hidden_dim == 8
    z = model.encode(lines[0])
    assert z.shape == (8,)
    assert np.all(np.abs(z) < 1)
    pos = [l for l, y in zip(lines, labels) if y == 1]
    neg = [l for l, y in zip(lines, labels) if y == 0]
    assert model.transfer(pos, pos, pos) == model.reconstruct(pos)
    flipped = model.transfer(neg, neg, pos)
    assert len(flipped) == len(neg)
    assert model.decode(z) == model.reconstruct(lines[:1])[0]
    with pytest.raises(ValueError):
        nst.Model(str(tmp_path / "missing.bin"))
