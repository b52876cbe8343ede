import copy

import pytest

from kbfg.data import Dataset, Example
from kbfg.features import serialize_feature
from kbfg.harness import HarnessConfig, base_features, maa, method_generator, run_experiment
from kbfg.kb import load_kb
from kbfg.learners import cross_validate, stratified_folds
from kbfg.recursive import GenerationConfig
from kbfg.synth import ScenarioSpec, gen_disorder_scenario

EMPTY_KB = load_kb([], [])


def small_scenario(seed=5):
    spec = ScenarioSpec(seed=seed, n_train=80, n_test=40, n_countries=8)
    return gen_disorder_scenario(spec)


def plain_ds():
    rows = list("aabbbcddee")
    labels = [1, 0, 1, 0, 1, 0, 1, 0, 1, 0]
    examples = [Example(f"e{i}", y, {"col": v})
                for i, (v, y) in enumerate(zip(rows, labels))]
    return Dataset(examples, [("col", "col")])


def test_baseline_reproduces_cross_validate():
    train, _, kb, _ = small_scenario()
    cfg = HarnessConfig(methods=("baseline",), learners=("tree",), folds=5, seed=3)
    res = run_experiment({"d": train}, kb, cfg)
    direct = cross_validate(train, base_features(train), kb, "tree", 5, 3)
    assert res.cell("d", "tree", "baseline").fold_accuracies == direct


def test_identical_methods_report_no_difference():
    # no applicable relations: every method degenerates to the baseline
    ds = plain_ds()
    cfg = HarnessConfig(methods=("baseline", "expand", "recursive_d1"),
                        learners=("tree",), folds=2, seed=0)
    res = run_experiment({"d": ds}, EMPTY_KB, cfg)
    for method in ("expand", "recursive_d1"):
        t = res.cell("d", "tree", method).t_vs_baseline
        assert t.no_difference
        assert t.significant_at == frozenset()


def test_recursive_d2_beats_baseline_on_oracle_scenario():
    train, _, kb, _ = small_scenario()
    cfg = HarnessConfig(methods=("baseline", "recursive_d2"), learners=("tree",),
                        folds=5, seed=1)
    res = run_experiment({"d": train}, kb, cfg)
    assert res.cell("d", "tree", "recursive_d2").mean \
        > res.cell("d", "tree", "baseline").mean


def test_single_class_dataset_rejected():
    examples = [Example(f"e{i}", 1, {"col": "a"}) for i in range(6)]
    ds = Dataset(examples, [("col", "col")])
    with pytest.raises(ValueError, match="single class"):
        run_experiment({"d": ds}, EMPTY_KB, HarnessConfig(folds=2))


def test_fold_assignments_identical_across_methods():
    # same seed, same labels: paired comparisons line up by construction
    train, _, kb, _ = small_scenario()
    folds_a = stratified_folds(train.labels, 5, 9)
    folds_b = stratified_folds(train.labels, 5, 9)
    assert folds_a == folds_b


def test_maa_is_max_over_learners():
    train, _, kb, _ = small_scenario()
    per_learner = []
    for kind in ("tree", "knn", "linear"):
        accs = cross_validate(train, base_features(train), kb, kind, 5, 0)
        per_learner.append(sum(accs) / len(accs))
    got = maa(train, kb, folds=5)
    assert got == pytest.approx(max(per_learner))
    assert all(got >= v for v in per_learner)


def test_maa_constant_labels_is_one():
    examples = [Example(f"e{i}", 1, {"col": f"v{i % 3}"}) for i in range(8)]
    ds = Dataset(examples, [("col", "col")])
    assert maa(ds, EMPTY_KB, folds=2) == 1.0


def test_accuracies_in_unit_interval():
    train, _, kb, _ = small_scenario()
    cfg = HarnessConfig(methods=("baseline", "expand"), learners=("knn", "linear"),
                        folds=4, seed=2)
    res = run_experiment({"d": train}, kb, cfg)
    for learner in cfg.learners:
        for method in cfg.methods:
            for acc in res.cell("d", learner, method).fold_accuracies:
                assert 0.0 <= acc <= 1.0


def corrupt_fold_values(ds, fold_indices):
    out = copy.deepcopy(ds)
    for i in fold_indices:
        out.examples[i].assignment["surname"] = f"junk{i}"
    return out


def test_fold_scope_generation_ignores_held_out_fold():
    train, _, kb, _ = small_scenario()
    folds = stratified_folds(train.labels, 4, seed=0)
    cfg = GenerationConfig(depth=1)
    gen = method_generator("recursive_d1", HarnessConfig(generation=cfg), kb,
                           base_features(train))
    probe = 1
    train_idx = [i for i in range(len(train)) if i not in set(folds[probe])]
    normal = [serialize_feature(f) for f in gen(train.subset(train_idx))]
    # corrupting only the held-out fold's values must not move the features
    corrupted = corrupt_fold_values(train, folds[probe])
    altered = [serialize_feature(f) for f in gen(corrupted.subset(train_idx))]
    assert normal == altered


def test_dataset_scope_generation_sees_every_fold():
    train, _, kb, _ = small_scenario()
    folds = stratified_folds(train.labels, 4, seed=0)
    gen = method_generator("recursive_d1",
                           HarnessConfig(generation=GenerationConfig(depth=1)),
                           kb, base_features(train))
    normal = [serialize_feature(f) for f in gen(train)]
    corrupted = corrupt_fold_values(train, folds[1])
    altered = [serialize_feature(f) for f in gen(corrupted)]
    assert normal != altered


def test_friedman_reported_for_multiple_datasets():
    train, test, kb, _ = small_scenario(1)  # both splits share one KB
    cfg = HarnessConfig(methods=("baseline", "recursive_d1"), learners=("tree",),
                        folds=4, seed=0)
    res = run_experiment({"a": train, "b": test}, kb, cfg)
    assert "tree" in res.friedman
    text = res.to_text()
    assert "friedman[tree]" in text
