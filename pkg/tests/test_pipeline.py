import numpy as np
import pytest

from factories import sol, toy_atlas
from seedmix import datagen, optimizer, pipeline
from seedmix.datagen import GenConfig
from seedmix.errors import UnknownCategoryError
from seedmix.optimizer import TAU_GRID, PortfolioSolution
from seedmix.pipeline import (
    PipelineConfig,
    SolutionAtlas,
    build_atlas,
    common_solution,
    compare_solutions,
    highlight_subregions,
    prevalence_ranking,
)


class TestBuildAtlas:
    def test_every_stored_solution_passes_invariants(self, small_atlas):
        count = 0
        for rid in small_atlas.subregion_ids():
            for tau in TAU_GRID:
                s = small_atlas.solution_at(rid, tau)  # from_json re-validates
                if s is not None:
                    count += 1
                    assert abs(sum(w for _, w in s.entries) - 1.0) <= 1e-9
            d = small_atlas.default_of(rid)
            if d is not None:
                assert d.tau in TAU_GRID
        assert count > 0

    def test_defaults_bounded_by_subregion_count(self, small_atlas):
        defaults = [
            small_atlas.default_of(rid)
            for rid in small_atlas.subregion_ids()
            if small_atlas.default_of(rid) is not None
        ]
        assert 0 < len(defaults) <= len(small_atlas.subregion_ids())

    def test_summary_averages_recomputable_from_records(self, small_atlas):
        defaults = [
            small_atlas.default_of(rid)
            for rid in small_atlas.subregion_ids()
            if small_atlas.default_of(rid) is not None
        ]
        summary = small_atlas.doc["summary"]
        assert summary["solved"] == len(defaults)
        assert summary["average_yield"] == pytest.approx(
            float(np.mean([d.expected_yield for d in defaults])), abs=1e-12
        )
        assert summary["average_sd"] == pytest.approx(
            float(np.mean([d.sd for d in defaults])), abs=1e-12
        )

    def test_sc_values_bounded(self, small_atlas):
        for rid in small_atlas.subregion_ids():
            for value in small_atlas.subregions[rid]["sc"].values():
                if value is not None:
                    assert 0.0 <= value <= 0.2 + 1e-12

    def test_objective_nondecreasing_across_taus(self, small_atlas):
        for rid in small_atlas.subregion_ids():
            objs = [
                small_atlas.solution_at(rid, tau).expected_yield
                for tau in TAU_GRID
                if small_atlas.solution_at(rid, tau) is not None
            ]
            assert all(b >= a - 1e-9 for a, b in zip(objs, objs[1:]))

    def test_single_region_single_variety(self):
        catalog = datagen.generate(
            GenConfig(n_subregions=1, n_varieties=1, years=(2000, 2006), seed=2,
                      noise_scale=0.02)
        )
        atlas = build_atlas(
            catalog, PipelineConfig(top_k=1, bins=4, n_trees=10, epochs=40, seed=1)
        )
        default = atlas.default_of("R0001")
        assert default is not None
        assert default.entries == (("V0001", 1.0),)

    def test_rebuild_is_byte_identical(self):
        cfg = GenConfig(n_subregions=6, n_varieties=3, years=(2000, 2005), seed=5)
        pc = PipelineConfig(top_k=3, bins=5, n_trees=8, epochs=30, seed=4)
        a = build_atlas(datagen.generate(cfg), pc)
        b = build_atlas(datagen.generate(cfg), pc)
        assert a.dumps() == b.dumps()

    def test_thread_count_does_not_change_output(self):
        cfg = GenConfig(n_subregions=6, n_varieties=3, years=(2000, 2005), seed=5)
        serial = build_atlas(
            datagen.generate(cfg),
            PipelineConfig(top_k=3, bins=5, n_trees=8, epochs=30, seed=4, threads=1),
        )
        threaded = build_atlas(
            datagen.generate(cfg),
            PipelineConfig(top_k=3, bins=5, n_trees=8, epochs=30, seed=4, threads=3),
        )
        a, b = serial.doc.copy(), threaded.doc.copy()
        a.pop("config"), b.pop("config")  # differs only in the threads field
        import json

        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_save_load_roundtrip(self, small_atlas, tmp_path):
        path = tmp_path / "atlas.json"
        small_atlas.save(path)
        loaded = SolutionAtlas.load(path)
        assert loaded.dumps() == small_atlas.dumps()


class TestPrevalence:
    def test_mean_includes_zero_weight_subregions(self):
        atlas = toy_atlas(
            {
                "R1": sol([("vA", 0.4), ("vB", 0.6)]),
                "R2": sol([("vA", 0.2), ("vB", 0.8)]),
                "R3": sol([("vB", 1.0)]),
                "R4": None,
            },
            ["vA", "vB"],
        )
        ranking = prevalence_ranking(atlas)
        by_code = {p.variety: p for p in ranking}
        assert by_code["vA"].expected_weight == pytest.approx(0.15, abs=1e-12)
        assert by_code["vA"].expected_weight == pytest.approx(
            np.mean(list(by_code["vA"].weights.values())), abs=1e-12
        )

    def test_absent_variety_ranks_last_with_zero(self):
        atlas = toy_atlas(
            {"R1": sol([("vA", 1.0)]), "R2": sol([("vA", 1.0)])},
            ["vA", "vZ"],
        )
        ranking = prevalence_ranking(atlas)
        assert ranking[0].variety == "vA"
        assert ranking[-1].variety == "vZ"
        assert ranking[-1].expected_weight == 0.0

    def test_universal_variety_ranks_first_with_one(self):
        atlas = toy_atlas(
            {"R1": sol([("vA", 1.0)]), "R2": sol([("vA", 1.0)])},
            ["vA", "vB"],
        )
        top = prevalence_ranking(atlas)[0]
        assert top.variety == "vA"
        assert top.expected_weight == 1.0

    def test_histogram_counts_nonzero_holders(self):
        atlas = toy_atlas(
            {
                "R1": sol([("vA", 0.4), ("vB", 0.6)]),
                "R2": sol([("vA", 0.15), ("vB", 0.85)]),
                "R3": None,
            },
            ["vA", "vB"],
        )
        for p in prevalence_ranking(atlas):
            holders = sum(1 for w in p.weights.values() if w > 0)
            assert sum(p.histogram) == holders

    def test_ranking_order_on_real_atlas(self, small_atlas):
        ranking = prevalence_ranking(small_atlas)
        weights = [p.expected_weight for p in ranking]
        assert weights == sorted(weights, reverse=True)
        assert {p.variety for p in ranking} == set(small_atlas.varieties)


class TestCommonSolution:
    def region_stats_atlas(self):
        # population min/max vars 0 and 10 normalize vA -> 0.8, vB -> 0.2
        stats = {
            "R1": {
                "vA": {"e": 10.0, "var": 8.0},
                "vB": {"e": 5.0, "var": 2.0},
                "vC": {"e": 1.0, "var": 0.0},
                "vD": {"e": 1.0, "var": 10.0},
            }
        }
        return toy_atlas(
            {"R1": sol([("vA", 1.0)])}, ["vA", "vB", "vC", "vD"], stats=stats
        )

    def test_single_variety_gets_full_weight(self):
        atlas = self.region_stats_atlas()
        result = common_solution(atlas, ["vA"])
        assert result.entries == (("vA", 1.0),)
        assert result.expected_yield == pytest.approx(10.0)

    def test_binding_budget_example_at_fixed_tau(self):
        atlas = self.region_stats_atlas()
        result = common_solution(atlas, ["vA", "vB"], tau=0.5)
        assert dict(result.entries) == pytest.approx({"vA": 0.5, "vB": 0.5})
        assert result.expected_yield == pytest.approx(7.5)

    def test_sweep_default_rule_prefers_highest_feasible_yield(self):
        atlas = self.region_stats_atlas()
        result = common_solution(atlas, ["vA", "vB"])
        assert result.expected_yield >= 7.5

    def test_region_stats_average_over_subregions(self):
        stats = {
            "R1": {"vA": {"e": 10.0, "var": 4.0}, "vB": {"e": 0.0, "var": 0.0}},
            "R2": {"vA": {"e": 20.0, "var": 8.0}, "vB": {"e": 0.0, "var": 0.0}},
        }
        atlas = toy_atlas(
            {"R1": sol([("vA", 1.0)]), "R2": sol([("vA", 1.0)])},
            ["vA", "vB"], stats=stats,
        )
        result = common_solution(atlas, ["vA"])
        assert result.expected_yield == pytest.approx(15.0)

    def test_too_many_varieties_rejected(self):
        atlas = toy_atlas({"R1": sol([("vA", 1.0)])}, [f"v{i}" for i in range(7)])
        with pytest.raises(ValueError):
            common_solution(atlas, [f"v{i}" for i in range(6)])

    def test_unknown_variety_rejected(self):
        atlas = self.region_stats_atlas()
        with pytest.raises(UnknownCategoryError):
            common_solution(atlas, ["nope"])

    def test_infeasible_at_fixed_low_tau(self):
        atlas = self.region_stats_atlas()
        assert common_solution(atlas, ["vA"], tau=0.1) is None  # norm_var 0.8

    def test_single_subregion_matches_forced_subset_optimization(self, small_atlas):
        # carve a one-region atlas out of the real fixture
        rid = small_atlas.subregion_ids()[0]
        doc = dict(small_atlas.doc)
        doc["subregions"] = {rid: small_atlas.subregions[rid]}
        one = SolutionAtlas(doc)
        chosen = sorted(one.varieties)[:2]

        got = common_solution(one, chosen)

        stats = {s.variety: s for s in pipeline.region_stats(one)}
        subset = [stats[c] for c in sorted(chosen)]
        e = np.array([s.e for s in subset])
        v = np.array([s.norm_var for s in subset])
        sweep = {}
        for tau in TAU_GRID:
            w = optimizer.solve_subset(e, v, tau)
            if w is not None:
                sd = optimizer.solution_sd(w, [s.var for s in subset])
                obj = float(w @ e)
                sweep[tau] = PortfolioSolution(
                    entries=tuple((s.variety, float(w[i])) for i, s in enumerate(subset)),
                    tau=tau, expected_yield=obj, variability=float(w @ v), sd=sd,
                    offset_pct=None if obj == 0 else optimizer.solution_offset(sd, obj),
                )
        expected = optimizer.default_solution(sweep)
        assert got == expected


class TestHighlight:
    def atlas(self):
        return toy_atlas(
            {
                "R1": sol([("vA", 0.5), ("vB", 0.5)]),
                "R2": sol([("vB", 1.0)]),
                "R3": sol([("vC", 1.0)]),
                "R4": None,
            },
            ["vA", "vB", "vC"],
        )

    def test_empty_selection_is_empty(self):
        assert highlight_subregions(self.atlas(), []) == []

    def test_full_range_equals_no_range(self):
        atlas = self.atlas()
        assert highlight_subregions(atlas, ["vB"]) == highlight_subregions(
            atlas, ["vB"], (0.0, 1.0)
        )

    def test_disjoint_footprints_union(self):
        atlas = self.atlas()
        a = highlight_subregions(atlas, ["vA"])
        c = highlight_subregions(atlas, ["vC"])
        assert set(a).isdisjoint(c)
        union = highlight_subregions(atlas, ["vA", "vC"])
        assert len(union) == len(a) + len(c)

    def test_weight_range_filters(self):
        atlas = self.atlas()
        assert highlight_subregions(atlas, ["vB"], (0.9, 1.0)) == ["R2"]
        assert highlight_subregions(atlas, ["vB"], (0.4, 0.6)) == ["R1"]


class TestCompare:
    def test_reports_both_solution_families(self, small_atlas):
        report = compare_solutions(small_atlas)
        assert report["differentiated"]["solved_subregions"] > 0
        assert np.isfinite(report["differentiated"]["mean_yield"])
        assert np.isfinite(report["differentiated"]["mean_variability"])
        assert report["common"] is not None
        assert np.isfinite(report["common"]["expected_yield"])
        assert 1 <= len(report["common"]["varieties"]) <= 5

    def test_explicit_variety_choice(self, small_atlas):
        chosen = sorted(small_atlas.varieties)[:2]
        report = compare_solutions(small_atlas, chosen)
        assert report["common"]["varieties"] == chosen
