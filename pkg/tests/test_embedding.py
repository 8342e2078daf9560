import numpy as np
import pytest
from scipy import sparse

from relwords.embedding import fit_kpca, transform, write_embedding_csv
from relwords.features import FeatureMatrix, Vocabulary


def make_feature_matrix(rows: np.ndarray, prefix: str = "d") -> FeatureMatrix:
    rows = np.asarray(rows, dtype=np.float64)
    terms = tuple(f"t{i:03d}" for i in range(rows.shape[1]))
    vocab = Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        doc_freq=np.ones(rows.shape[1], dtype=np.int64),
    )
    return FeatureMatrix(
        matrix=sparse.csr_matrix(rows),
        vocab=vocab,
        doc_ids=tuple(f"{prefix}{k}" for k in range(rows.shape[0])),
    )


def centered_gram(rows: np.ndarray) -> np.ndarray:
    gram = rows @ rows.T
    n = gram.shape[0]
    ones = np.full((n, n), 1.0 / n)
    return gram - ones @ gram - gram @ ones + ones @ gram @ ones


def random_tfidf(rng, n, t):
    rows = rng.random((n, t)) * (rng.random((n, t)) < 0.3)
    rows[rows.sum(axis=1) == 0, 0] = rng.random()  # no all-zero doc
    return rows


class TestFitKpca:
    def test_identical_documents_degenerate(self):
        fm = make_feature_matrix(np.ones((4, 3)))
        with pytest.raises(ValueError, match="degenerate corpus"):
            fit_kpca(fm)

    def test_all_zero_matrix_degenerate(self):
        fm = make_feature_matrix(np.zeros((3, 3)))
        with pytest.raises(ValueError, match="degenerate corpus"):
            fit_kpca(fm)

    def test_single_document_rejected(self):
        fm = make_feature_matrix(np.ones((1, 3)))
        with pytest.raises(ValueError, match="at least 2"):
            fit_kpca(fm)

    def test_orthogonal_unit_rows(self):
        # Centered Gram of the 3x3 identity is I - J/3: eigenvalues {1, 1, 0},
        # so two components survive and the embedded points are the corners
        # of an equilateral triangle with squared side 2.
        fm = make_feature_matrix(np.eye(3))
        model = fit_kpca(fm)
        assert model.eigenvalues.shape == (2,)
        np.testing.assert_allclose(model.eigenvalues, [1.0, 1.0], atol=1e-12)
        coords = transform(model, fm).coords
        for i in range(3):
            for j in range(i + 1, 3):
                side = np.sum((coords[i] - coords[j]) ** 2)
                assert side == pytest.approx(2.0, abs=1e-10)

    def test_component_cap_applies(self):
        rng = np.random.default_rng(0)
        fm = make_feature_matrix(random_tfidf(rng, 40, 60))
        model = fit_kpca(fm, max_components=10)
        assert model.eigenvalues.shape == (10,)
        assert model.dual_coef.shape == (40, 10)

    def test_default_cap_on_large_corpus(self):
        rng = np.random.default_rng(10)
        fm = make_feature_matrix(random_tfidf(rng, 300, 400))
        model = fit_kpca(fm)  # default cap of 250
        assert model.eigenvalues.shape == (250,)

    def test_rank_deficiency_shrinks_components(self):
        rng = np.random.default_rng(1)
        base = random_tfidf(rng, 5, 30)
        rows = np.vstack([base, base + 0.0])  # rank <= 5
        model = fit_kpca(make_feature_matrix(rows), max_components=250)
        assert model.eigenvalues.shape[0] <= 5

    def test_eigenvalues_sorted_descending_positive(self):
        rng = np.random.default_rng(2)
        model = fit_kpca(make_feature_matrix(random_tfidf(rng, 25, 40)))
        assert np.all(model.eigenvalues > 0)
        assert np.all(np.diff(model.eigenvalues) <= 0)

    def test_dual_coefficient_normalization(self):
        rng = np.random.default_rng(3)
        model = fit_kpca(make_feature_matrix(random_tfidf(rng, 20, 30)))
        norms = model.eigenvalues * np.sum(model.dual_coef**2, axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_refit_is_bitwise_reproducible(self):
        rng = np.random.default_rng(4)
        rows = random_tfidf(rng, 15, 25)
        first = fit_kpca(make_feature_matrix(rows))
        second = fit_kpca(make_feature_matrix(rows))
        assert np.array_equal(first.dual_coef, second.dual_coef)
        assert np.array_equal(first.eigenvalues, second.eigenvalues)


class TestTransform:
    def test_training_gram_reconstruction(self):
        rng = np.random.default_rng(5)
        rows = random_tfidf(rng, 30, 50)
        fm = make_feature_matrix(rows)
        model = fit_kpca(fm, max_components=250)
        coords = transform(model, fm).coords
        reference = centered_gram(rows)
        err = np.linalg.norm(coords @ coords.T - reference) / np.linalg.norm(reference)
        assert err <= 1e-8

    def test_duplicate_documents_identical_rows(self):
        rng = np.random.default_rng(6)
        rows = random_tfidf(rng, 12, 20)
        rows[7] = rows[2]
        fm = make_feature_matrix(rows)
        coords = transform(fit_kpca(fm), fm).coords
        assert np.array_equal(coords[7], coords[2])

    def test_new_document_equal_to_training_doc(self):
        rng = np.random.default_rng(7)
        rows = random_tfidf(rng, 10, 15)
        fm = make_feature_matrix(rows)
        model = fit_kpca(fm)
        training_coords = transform(model, fm).coords
        single = make_feature_matrix(rows[4:5], prefix="new")
        new_coords = transform(model, single).coords
        np.testing.assert_allclose(new_coords[0], training_coords[4], atol=1e-10)

    def test_vocabulary_dimension_mismatch(self):
        rng = np.random.default_rng(8)
        model = fit_kpca(make_feature_matrix(random_tfidf(rng, 6, 10)))
        other = make_feature_matrix(random_tfidf(rng, 3, 11))
        with pytest.raises(ValueError, match="mismatch"):
            transform(model, other)

    def test_column_sign_flip_leaves_cosines_unchanged(self):
        rng = np.random.default_rng(9)
        fm = make_feature_matrix(random_tfidf(rng, 12, 18))
        model = fit_kpca(fm)
        coords = transform(model, fm).coords
        flipped = coords.copy()
        flipped[:, 0] = -flipped[:, 0]

        def cosine_matrix(m):
            norms = np.linalg.norm(m, axis=1, keepdims=True)
            return (m / norms) @ (m / norms).T

        np.testing.assert_allclose(
            cosine_matrix(flipped), cosine_matrix(coords), atol=1e-12
        )


def test_embedding_csv_dump(tmp_path):
    fm = make_feature_matrix(np.eye(3))
    model = fit_kpca(fm)
    emb = transform(model, fm)
    out = tmp_path / "embedding.csv"
    write_embedding_csv(emb, out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "doc_id,c0,c1"
    assert len(lines) == 4
    assert lines[1].startswith("d0,")
