from hypothesis import given, strategies as st

from kbfg.aggregators import any_aggregate, majority_aggregate
from kbfg.data import Dataset, Example
from kbfg.expand import expand_features, observed_values
from kbfg.features import BaseFeature
from kbfg.kb import load_kb


def test_majority_strict():
    values = ["poland", "poland", "egypt"]
    assert majority_aggregate(values, "poland") == 1
    assert majority_aggregate(values, "egypt") == 0


def test_majority_tie_lexicographic():
    assert majority_aggregate(["a", "b"], "a") == 1
    assert majority_aggregate(["a", "b"], "b") == 0


def test_majority_empty_is_zero():
    assert majority_aggregate([], "anything") == 0


def test_any_basic():
    assert any_aggregate(["libya", "sudan"], "sudan") == 1
    assert any_aggregate([], "x") == 0
    assert any_aggregate(["x"], "x") == 1


tokens = st.text(alphabet="abcde", min_size=1, max_size=3)
multisets = st.lists(tokens, max_size=10)


@given(multisets)
def test_majority_exactly_one_fires(values):
    fired = sum(majority_aggregate(values, v) for v in set(values) | {"zz", "q"})
    assert fired == (1 if values else 0)


@given(multisets, multisets, tokens)
def test_any_monotone_under_growth(xs, ys, v):
    assert any_aggregate(xs + ys, v) >= any_aggregate(xs, v)


KB = load_kb(
    [
        "countryOf\tnowak\tpoland",
        "countryOf\thaddad\tegypt",
        "borderOf\tegypt\tlibya",
        "borderOf\tegypt\tsudan",
        "borderOf\tpoland\tgermany",
    ],
    [
        "countryOf\tsurname\tcountry\tfn",
        "borderOf\tcountry\tcountry\trel",
    ],
)


def make_ds(col, values, labels=None):
    labels = labels or [i % 2 for i in range(len(values))]
    examples = [Example(f"e{i}", y, {col: v})
                for i, (v, y) in enumerate(zip(values, labels))]
    return Dataset(examples, [(col, col)])


def test_function_relation_gives_single_composition():
    ds = make_ds("surname", ["nowak", "haddad"])
    out = expand_features(ds, [BaseFeature("surname")], KB, "any", 1.0)
    assert [f.name for f in out] == ["countryOf(surname)"]


def test_non_function_gives_one_feature_per_observed_value():
    ds = make_ds("country", ["egypt", "poland"])
    out = expand_features(ds, [BaseFeature("country")], KB, "any", 1.0)
    assert [f.name for f in out] == [
        "borderOf(country):any=germany",
        "borderOf(country):any=libya",
        "borderOf(country):any=sudan",
    ]


def test_no_applicable_relations_gives_nothing():
    ds = make_ds("color", ["red", "blue"])
    assert expand_features(ds, [BaseFeature("color")], KB, "any", 1.0) == []


def test_coverage_threshold_admits_partial():
    ds = make_ds("surname", ["nowak", "martian"])
    assert expand_features(ds, [BaseFeature("surname")], KB, "any", 1.0) == []
    out = expand_features(ds, [BaseFeature("surname")], KB, "any", 0.5)
    assert [f.name for f in out] == ["countryOf(surname)"]


def test_output_count_equals_observed_codomain():
    ds = make_ds("country", ["egypt"])
    out = expand_features(ds, [BaseFeature("country")], KB, "majority", 1.0)
    observed = KB.lookup("borderOf", "egypt")
    assert len(out) == len(observed)


def test_no_duplicate_names():
    ds = make_ds("country", ["egypt", "poland"])
    out = expand_features(ds, [BaseFeature("country"), BaseFeature("country")],
                          KB, "any", 1.0)
    names = [f.name for f in out]
    assert len(names) == len(set(names))


def test_observed_values_unpacks_sets_and_skips_missing():
    examples = [
        Example("a", 0, {"entities": frozenset({"egypt", "poland"})}),
        Example("b", 1, {"entities": None}),
        Example("c", 0, {"entities": frozenset({"egypt"})}),
    ]
    ds = Dataset(examples, [("entities", "country")])
    assert observed_values(ds, BaseFeature("entities"), KB) == ["egypt", "poland"]
