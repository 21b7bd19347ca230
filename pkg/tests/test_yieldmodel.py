import numpy as np
import pytest

from seedmix import yieldmodel
from seedmix.domain import ExperimentRecord
from seedmix.errors import DegenerateRangeError, UnknownCategoryError
from seedmix.yieldmodel import (
    BinScheme,
    FeatureSchema,
    Forest,
    YieldDistribution,
    bin_of,
    expected_value,
    fit_bins,
    predict_distribution,
    train_forest,
    variance,
)


def record(rid="R1", year=2000, variety="V1", weather=(10.0, 600.0, 5000.0),
           soil=(6.5, 3.0, 12.0), y=40.0):
    return ExperimentRecord(sub_region=rid, year=year, variety=variety,
                            weather=weather, soil=soil, yield_value=y)


class TestBins:
    def test_two_bins_over_0_to_10(self):
        scheme = fit_bins(list(range(11)), 2)
        assert scheme.edges == (0.0, 5.0, 10.0)

    def test_four_bins_over_10_to_30(self):
        scheme = fit_bins([10.0, 20.0, 30.0], 4)
        assert scheme.edges == (10.0, 15.0, 20.0, 25.0, 30.0)

    def test_constant_yields_rejected(self):
        with pytest.raises(DegenerateRangeError):
            fit_bins([7.0, 7.0, 7.0], 4)

    def test_edges_have_constant_width(self):
        scheme = fit_bins([3.0, 97.3], 20)
        widths = np.diff(scheme.edges)
        assert np.allclose(widths, widths[0], atol=1e-9)

    def test_bin_of_left_closed_convention(self):
        scheme = BinScheme(r=2, lo=0.0, hi=10.0, edges=(0.0, 5.0, 10.0))
        assert bin_of(scheme, 5.0) == 1
        assert bin_of(scheme, 0.0) == 0
        assert bin_of(scheme, 10.0) == 1  # top edge clamps into the last bin
        assert bin_of(scheme, -3.0) == 0
        assert bin_of(scheme, 42.0) == 1


def separable_records(n_per_class=60, seed=0):
    """Two classes split cleanly by temperature; yields 10 vs 90."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_per_class):
        records.append(record(
            variety="V1" if i % 2 else "V2",
            weather=(5.0 + rng.normal(0, 0.8), 600.0 + rng.normal(0, 30), 5000.0),
            soil=(6.5 + rng.normal(0, 0.2), 3.0, 12.0),
            y=10.0,
        ))
        records.append(record(
            variety="V1" if i % 3 else "V2",
            weather=(15.0 + rng.normal(0, 0.8), 600.0 + rng.normal(0, 30), 5000.0),
            soil=(6.5 + rng.normal(0, 0.2), 3.0, 12.0),
            y=90.0,
        ))
    return records


class TestTrainForest:
    def test_out_of_bag_accuracy_on_separable_data(self):
        records = separable_records()
        scheme = fit_bins([r.yield_value for r in records], 2)
        forest = train_forest(records, scheme, n_trees=40, seed=1)
        assert forest.oob_accuracy is not None
        assert forest.oob_accuracy > 0.9

    def test_single_tree_without_bootstrap_fits_training_data(self):
        records = separable_records(n_per_class=30)
        scheme = fit_bins([r.yield_value for r in records], 2)
        forest = train_forest(records, scheme, n_trees=1, seed=3, bootstrap=False)
        assert forest.oob_accuracy is None
        hits = 0
        for rec in records:
            d = predict_distribution(forest, rec.weather, rec.soil, rec.variety)
            hits += int(np.argmax(d.probs)) == bin_of(scheme, rec.yield_value)
        assert hits / len(records) > 0.95

    def test_same_seed_reproduces_predictions(self):
        records = separable_records(n_per_class=20)
        scheme = fit_bins([r.yield_value for r in records], 2)
        a = train_forest(records, scheme, n_trees=15, seed=9)
        b = train_forest(records, scheme, n_trees=15, seed=9)
        assert np.array_equal(a.node_feature, b.node_feature)
        assert np.array_equal(a.node_value, b.node_value)
        for rec in records[:10]:
            da = predict_distribution(a, rec.weather, rec.soil, rec.variety)
            db = predict_distribution(b, rec.weather, rec.soil, rec.variety)
            assert np.array_equal(da.probs, db.probs)

    def test_variety_feature_can_drive_splits(self):
        # identical conditions; only the variety separates the classes
        records = []
        for i in range(40):
            records.append(record(variety="V1", y=10.0))
            records.append(record(variety="V2", y=90.0))
        scheme = fit_bins([r.yield_value for r in records], 2)
        forest = train_forest(records, scheme, n_trees=25, seed=2)
        d1 = predict_distribution(forest, (10.0, 600.0, 5000.0), (6.5, 3.0, 12.0), "V1")
        d2 = predict_distribution(forest, (10.0, 600.0, 5000.0), (6.5, 3.0, 12.0), "V2")
        assert d1.probs[0] > 0.9
        assert d2.probs[1] > 0.9


def stump_forest(labels, scheme):
    """A forest of single-leaf trees with the given vote labels."""
    n = len(labels)
    schema = FeatureSchema(
        weather_names=("temperature", "precipitation", "solar_radiation"),
        soil_names=("soil_ph", "soil_organic_matter", "soil_cec"),
        varieties=("V1",),
    )
    return Forest(
        node_feature=np.full(n, -1, dtype=np.int64),
        node_value=np.zeros(n),
        node_left=np.full(n, -1, dtype=np.int64),
        node_right=np.full(n, -1, dtype=np.int64),
        node_label=np.asarray(labels, dtype=np.int64),
        tree_offset=np.arange(n + 1, dtype=np.int64),
        n_trees=n,
        schema=schema,
        scheme=scheme,
        seed=0,
    )


class TestPredictDistribution:
    def test_vote_counts_become_probabilities(self):
        scheme = BinScheme(r=2, lo=0.0, hi=10.0, edges=(0.0, 5.0, 10.0))
        forest = stump_forest([0] * 30 + [1] * 70, scheme)
        d = predict_distribution(forest, (1.0, 2.0, 3.0), (4.0, 5.0, 6.0), "V1")
        assert d.probs.tolist() == [0.3, 0.7]

    def test_unanimous_forest_is_one_hot(self):
        scheme = BinScheme(r=4, lo=0.0, hi=8.0, edges=(0.0, 2.0, 4.0, 6.0, 8.0))
        forest = stump_forest([2] * 50, scheme)
        d = predict_distribution(forest, (1.0, 2.0, 3.0), (4.0, 5.0, 6.0), "V1")
        assert d.probs.tolist() == [0.0, 0.0, 1.0, 0.0]

    def test_probabilities_always_sum_to_one(self):
        records = separable_records(n_per_class=25)
        scheme = fit_bins([r.yield_value for r in records], 5)
        forest = train_forest(records, scheme, n_trees=17, seed=5)
        rng = np.random.default_rng(0)
        for _ in range(25):
            d = predict_distribution(
                forest,
                rng.uniform(0, 20, 3).tolist(),
                rng.uniform(0, 15, 3).tolist(),
                "V1",
            )
            assert abs(d.probs.sum() - 1.0) <= 1e-9
            assert (d.probs >= 0).all()

    def test_prediction_is_pure(self):
        records = separable_records(n_per_class=15)
        scheme = fit_bins([r.yield_value for r in records], 3)
        forest = train_forest(records, scheme, n_trees=9, seed=7)
        a = predict_distribution(forest, (5.0, 600.0, 5000.0), (6.5, 3.0, 12.0), "V1")
        b = predict_distribution(forest, (5.0, 600.0, 5000.0), (6.5, 3.0, 12.0), "V1")
        assert np.array_equal(a.probs, b.probs)

    def test_unknown_variety_rejected(self):
        scheme = BinScheme(r=2, lo=0.0, hi=10.0, edges=(0.0, 5.0, 10.0))
        forest = stump_forest([0, 1], scheme)
        with pytest.raises(UnknownCategoryError, match="V9"):
            predict_distribution(forest, (1.0, 2.0, 3.0), (4.0, 5.0, 6.0), "V9")

    def test_distribution_validator_enforces_sum(self):
        scheme = BinScheme(r=2, lo=0.0, hi=10.0, edges=(0.0, 5.0, 10.0))
        with pytest.raises(ValueError):
            YieldDistribution(scheme=scheme, probs=np.array([0.5, 0.4]))


class TestMoments:
    def scheme(self):
        return BinScheme(r=2, lo=0.0, hi=10.0, edges=(0.0, 5.0, 10.0))

    def test_even_split_over_two_bins(self):
        d = YieldDistribution(scheme=self.scheme(), probs=np.array([0.5, 0.5]))
        assert expected_value(d) == pytest.approx(5.0)
        assert variance(d) == pytest.approx(6.25)

    def test_one_hot_has_zero_variance(self):
        d = YieldDistribution(scheme=self.scheme(), probs=np.array([0.0, 1.0]))
        assert expected_value(d) == pytest.approx(7.5)
        assert variance(d) == 0.0

    def test_uniform_over_symmetric_bins_centers(self):
        scheme = BinScheme(r=4, lo=2.0, hi=10.0, edges=(2.0, 4.0, 6.0, 8.0, 10.0))
        d = YieldDistribution(scheme=scheme, probs=np.full(4, 0.25))
        assert expected_value(d) == pytest.approx(6.0)

    def test_variance_nonnegative_and_zero_iff_onehot(self):
        rng = np.random.default_rng(11)
        scheme = BinScheme(r=5, lo=0.0, hi=10.0, edges=tuple(np.linspace(0, 10, 6)))
        for _ in range(40):
            p = rng.dirichlet(np.ones(5))
            d = YieldDistribution(scheme=scheme, probs=p)
            v = variance(d)
            assert v >= 0.0
            if v == 0.0:
                assert np.isclose(p.max(), 1.0)

    def test_stump_degeneracy_matches_single_stump(self):
        # a forest of identical stumps behaves exactly like one stump
        scheme = self.scheme()
        many = stump_forest([1] * 33, scheme)
        one = stump_forest([1], scheme)
        args = ((1.0, 2.0, 3.0), (4.0, 5.0, 6.0), "V1")
        assert np.array_equal(
            predict_distribution(many, *args).probs,
            predict_distribution(one, *args).probs,
        )


class TestSerialization:
    def test_forest_roundtrip_preserves_predictions(self):
        records = separable_records(n_per_class=15)
        scheme = fit_bins([r.yield_value for r in records], 4)
        forest = train_forest(records, scheme, n_trees=7, seed=13)
        doc = yieldmodel.forest_to_doc(forest)
        loaded = yieldmodel.forest_from_doc(doc)
        for rec in records[:8]:
            a = predict_distribution(forest, rec.weather, rec.soil, rec.variety)
            b = predict_distribution(loaded, rec.weather, rec.soil, rec.variety)
            assert np.array_equal(a.probs, b.probs)

    def test_doc_is_json_serializable(self):
        import json

        records = separable_records(n_per_class=10)
        scheme = fit_bins([r.yield_value for r in records], 2)
        forest = train_forest(records, scheme, n_trees=3, seed=1)
        text = json.dumps(yieldmodel.forest_to_doc(forest))
        loaded = yieldmodel.forest_from_doc(json.loads(text))
        assert loaded.n_trees == 3
