"""Command-line front end: JSON models in, deterministic JSON reports out.

Subcommands: attribute, interact, oracle-check, converse, expected,
ingest.  All rationals cross the wire as strings ("3/8"), never JSON
floats; decimal renderings are advisory only.  Identical inputs produce
byte-identical output.

Exit codes: 0 success (oracle-check: all equal; converse: round-trip
matches), 1 comparison mismatch, 2 schema violation, 3 scheme or space
mismatch, 4 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import (
    Coalition,
    FeatureSpace,
    Instance,
    ProductDistribution,
    SpaceMismatchError,
    WeightError,
    decimal_string,
    format_rational,
    parse_rational,
)
from .converse import (
    ConverseInapplicableError,
    ConverseSystem,
    index_engine_oracle,
    recover_expectation_detailed,
)
from .indices import (
    PATH_BERNOULLI,
    BernoulliWeights,
    SimpleWeights,
    attribute_all,
    compute_bernoulli_index,
    compute_simple_index,
    interpolate_coefficients,
)
from .interaction import (
    BernoulliInteractionWeights,
    BivariateGrid,
    InteractionWeights,
    PATH_BIVARIATE,
    compute_interaction_bernoulli,
    compute_interaction_simple,
)
from .models import (
    AdditiveModel,
    CountingModel,
    EnsembleModel,
    Leaf,
    Model,
    Split,
    TableModel,
    TreeModel,
)
from .oracle import (
    BudgetExceededError,
    brute_bernoulli_index,
    brute_coalition_sums,
    brute_expectation,
    brute_interaction_index,
    brute_simple_index,
    conditional_table,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_SCHEMA = 2
EXIT_SCHEME = 3
EXIT_BUDGET = 4


class SchemaError(Exception):
    """An input file or descriptor violates its schema."""


# ---------------------------------------------------------------------------
# input parsing


@dataclass(frozen=True)
class NamedSpace:
    """A feature space together with the feature names used in files."""

    names: tuple[str, ...]
    space: FeatureSpace

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown feature name {name!r}") from None


def _require(obj, key, context):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{context}: missing required field {key!r}")
    return obj[key]


def _rational(text, context) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise SchemaError(f"{context}: {exc}") from None


def _load_json(path: str):
    try:
        with open(path, "rb") as handle:
            return json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None


def parse_space(doc) -> NamedSpace:
    features = _require(doc, "features", "space")
    if not isinstance(features, list) or not features:
        raise SchemaError("space.features must be a nonempty list")
    names = []
    domains = []
    for idx, feat in enumerate(features):
        name = _require(feat, "name", f"space.features[{idx}]")
        values = _require(feat, "values", f"space.features[{idx}]")
        if not isinstance(name, str):
            raise SchemaError(f"space.features[{idx}].name must be a string")
        if not isinstance(values, list) or not values:
            raise SchemaError(f"space.features[{idx}].values must be a nonempty list")
        if not all(isinstance(v, str) for v in values):
            raise SchemaError(f"space.features[{idx}].values must be strings")
        if len(set(values)) != len(values):
            raise SchemaError(f"space.features[{idx}].values contains duplicates")
        names.append(name)
        domains.append(values)
    if len(set(names)) != len(names):
        raise SchemaError("space.features contains duplicate feature names")
    return NamedSpace(tuple(names), FeatureSpace(domains))


def _parse_tree_node(doc, named: NamedSpace, context: str):
    if not isinstance(doc, dict):
        raise SchemaError(f"{context}: tree node must be an object")
    if "leaf" in doc:
        return Leaf(_rational(doc["leaf"], f"{context}.leaf"))
    name = _require(doc, "feature", context)
    children_doc = _require(doc, "children", context)
    feature = named.index(name)
    domain = named.space.domains[feature]
    if not isinstance(children_doc, dict):
        raise SchemaError(f"{context}.children must be an object keyed by value")
    unknown = set(children_doc) - set(domain)
    if unknown:
        raise SchemaError(
            f"{context}.children: {sorted(unknown)!r} are not values of feature {name!r}"
        )
    missing = set(domain) - set(children_doc)
    if missing:
        raise SchemaError(
            f"{context}.children: missing children for values {sorted(missing)!r} "
            f"of feature {name!r}"
        )
    children = tuple(
        _parse_tree_node(children_doc[v], named, f"{context}.children[{v!r}]")
        for v in domain
    )
    return Split(feature, children)


def parse_model(doc, named: NamedSpace, context: str = "model") -> Model:
    kind = _require(doc, "type", context)
    space = named.space
    if kind == "table":
        values = _require(doc, "values", context)
        if not isinstance(values, list):
            raise SchemaError(f"{context}.values must be a list")
        expected = space.outcome_count()
        if len(values) != expected:
            raise SchemaError(
                f"{context}.values has {len(values)} entries; the full domain has {expected}"
            )
        return TableModel(
            space, [_rational(v, f"{context}.values[{i}]") for i, v in enumerate(values)]
        )
    if kind == "additive":
        bias = _rational(doc.get("bias", "0"), f"{context}.bias")
        terms_doc = _require(doc, "terms", context)
        if not isinstance(terms_doc, list):
            raise SchemaError(f"{context}.terms must be a list")
        rows: list[Optional[list[Fraction]]] = [None] * space.n
        for idx, term in enumerate(terms_doc):
            name = _require(term, "feature", f"{context}.terms[{idx}]")
            values = _require(term, "values", f"{context}.terms[{idx}]")
            feature = named.index(name)
            if rows[feature] is not None:
                raise SchemaError(f"{context}.terms: duplicate entry for feature {name!r}")
            domain = space.domains[feature]
            if not isinstance(values, list) or len(values) != len(domain):
                raise SchemaError(
                    f"{context}.terms[{idx}].values must list one value per domain "
                    f"value of {name!r} ({len(domain)})"
                )
            rows[feature] = [
                _rational(v, f"{context}.terms[{idx}].values[{k}]")
                for k, v in enumerate(values)
            ]
        for feature, row in enumerate(rows):
            if row is None:
                raise SchemaError(
                    f"{context}.terms: missing entry for feature {named.names[feature]!r}"
                )
        return AdditiveModel(space, bias, rows)
    if kind == "tree":
        root = _parse_tree_node(_require(doc, "root", context), named, f"{context}.root")
        try:
            return TreeModel(space, root)
        except ValueError as exc:
            raise SchemaError(f"{context}: {exc}") from None
    if kind == "ensemble":
        components_doc = _require(doc, "components", context)
        if not isinstance(components_doc, list) or not components_doc:
            raise SchemaError(f"{context}.components must be a nonempty list")
        components = []
        for idx, comp in enumerate(components_doc):
            weight = _rational(
                _require(comp, "weight", f"{context}.components[{idx}]"),
                f"{context}.components[{idx}].weight",
            )
            inner = parse_model(
                _require(comp, "model", f"{context}.components[{idx}]"),
                named,
                f"{context}.components[{idx}].model",
            )
            components.append((weight, inner))
        return EnsembleModel(components)
    raise SchemaError(f"{context}.type must be one of table, additive, tree, ensemble")


def load_model_file(path: str) -> tuple[NamedSpace, Model]:
    doc = _load_json(path)
    named = parse_space(_require(doc, "space", path))
    model = parse_model(_require(doc, "model", path), named)
    return named, model


def parse_distribution(doc, named: NamedSpace, context: str) -> ProductDistribution:
    space = named.space
    if doc.get("uniform") is True:
        return ProductDistribution.uniform(space)
    marginals_doc = _require(doc, "marginals", context)
    if not isinstance(marginals_doc, list):
        raise SchemaError(f"{context}.marginals must be a list")
    rows: list[Optional[list[Fraction]]] = [None] * space.n
    for idx, entry in enumerate(marginals_doc):
        name = _require(entry, "feature", f"{context}.marginals[{idx}]")
        probs = _require(entry, "probs", f"{context}.marginals[{idx}]")
        feature = named.index(name)
        if rows[feature] is not None:
            raise SchemaError(f"{context}.marginals: duplicate entry for feature {name!r}")
        domain = space.domains[feature]
        if "values" in entry and list(entry["values"]) != list(domain):
            raise SchemaError(
                f"{context}.marginals[{idx}].values does not match the declared "
                f"domain of {name!r}"
            )
        if not isinstance(probs, list) or len(probs) != len(domain):
            raise SchemaError(
                f"{context}.marginals[{idx}].probs must list one probability per "
                f"domain value of {name!r} ({len(domain)})"
            )
        rows[feature] = [
            _rational(p, f"{context}.marginals[{idx}].probs[{k}]")
            for k, p in enumerate(probs)
        ]
    for feature, row in enumerate(rows):
        if row is None:
            raise SchemaError(
                f"{context}.marginals: missing entry for feature {named.names[feature]!r}"
            )
    try:
        return ProductDistribution(space, rows)
    except ValueError as exc:
        raise SchemaError(f"{context}: {exc}") from None


def parse_instance(doc, named: NamedSpace, context: str = "instance") -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError(f"{context} must be an object mapping feature names to values")
    unknown = set(doc) - set(named.names)
    if unknown:
        raise SchemaError(f"{context}: unknown feature names {sorted(unknown)!r}")
    values = []
    for i, name in enumerate(named.names):
        if name not in doc:
            raise SchemaError(f"{context}: missing value for feature {name!r}")
        value = doc[name]
        if value not in named.space.domains[i]:
            raise SchemaError(
                f"{context}: value {value!r} is not in the domain of feature {name!r}"
            )
        values.append(value)
    return Instance(named.space, values)


Scheme = Union[SimpleWeights, BernoulliWeights]
InteractionScheme = Union[InteractionWeights, BernoulliInteractionWeights]

_PRESETS = ("shapley", "banzhaf", "binomial", "dictatorial", "marginal")


def parse_scheme(doc, n: int, context: str = "scheme") -> Scheme:
    if not isinstance(doc, dict):
        raise SchemaError(f"{context} must be a JSON object")
    if "preset" in doc:
        preset = doc["preset"]
        if preset not in _PRESETS:
            raise SchemaError(f"{context}.preset must be one of {', '.join(_PRESETS)}")
        if preset == "binomial":
            theta = _rational(_require(doc, "theta", context), f"{context}.theta")
            return SimpleWeights.binomial(n, theta)
        if "theta" in doc:
            raise SchemaError(f"{context}.theta is only valid with the binomial preset")
        return getattr(SimpleWeights, preset)(n)
    if "q" in doc:
        values = doc["q"]
        if not isinstance(values, list):
            raise SchemaError(f"{context}.q must be a list of rationals")
        q = [_rational(v, f"{context}.q[{k}]") for k, v in enumerate(values)]
        return SimpleWeights.from_values(q)
    if "bernoulli" in doc:
        theta_doc = _require(doc["bernoulli"], "theta", f"{context}.bernoulli")
        if not isinstance(theta_doc, list):
            raise SchemaError(f"{context}.bernoulli.theta must be a list of rationals")
        theta = [
            _rational(t, f"{context}.bernoulli.theta[{k}]")
            for k, t in enumerate(theta_doc)
        ]
        return BernoulliWeights(theta)
    raise SchemaError(f"{context} must contain one of: preset, q, bernoulli")


def parse_interaction_scheme(doc, n: int, context: str = "scheme") -> InteractionScheme:
    if not isinstance(doc, dict):
        raise SchemaError(f"{context} must be a JSON object")
    if "q" in doc:
        table = doc["q"]
        if not isinstance(table, dict):
            raise SchemaError(
                f"{context}.q must be an object with fields 'm' and 'values'"
            )
        m = _require(table, "m", f"{context}.q")
        values = _require(table, "values", f"{context}.q")
        if not isinstance(m, int):
            raise SchemaError(f"{context}.q.m must be an integer")
        if not isinstance(values, list):
            raise SchemaError(f"{context}.q.values must be a list of rationals")
        row = [_rational(v, f"{context}.q.values[{k}]") for k, v in enumerate(values)]
        return InteractionWeights.single(n, m, row)
    if "bernoulli" in doc:
        theta_doc = _require(doc["bernoulli"], "theta", f"{context}.bernoulli")
        if not isinstance(theta_doc, list):
            raise SchemaError(f"{context}.bernoulli.theta must be a list of rationals")
        theta = [
            _rational(t, f"{context}.bernoulli.theta[{k}]")
            for k, t in enumerate(theta_doc)
        ]
        return BernoulliInteractionWeights(theta)
    raise SchemaError(f"{context} must contain one of: q, bernoulli")


def scheme_descriptor(scheme) -> dict:
    """Canonical JSON echo of a parsed scheme."""
    if isinstance(scheme, SimpleWeights):
        if scheme.preset == "binomial":
            return {"preset": "binomial", "theta": format_rational(scheme.theta)}
        if scheme.preset is not None:
            return {"preset": scheme.preset}
        return {"q": [format_rational(v) for v in scheme.q]}
    if isinstance(scheme, BernoulliWeights):
        return {"bernoulli": {"theta": [format_rational(t) for t in scheme.theta]}}
    if isinstance(scheme, InteractionWeights):
        (m, row), = scheme.rows().items()
        return {"q": {"m": m, "values": [format_rational(v) for v in row]}}
    if isinstance(scheme, BernoulliInteractionWeights):
        return {"bernoulli": {"theta": [format_rational(t) for t in scheme.theta]}}
    raise TypeError(f"unsupported scheme {scheme!r}")


def ingest_csv(path: str, named: NamedSpace) -> tuple[ProductDistribution, int]:
    """Empirical per-feature marginals from a CSV of observed rows."""
    space = named.space
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if sorted(header) != sorted(named.names):
            raise SchemaError(
                f"{path}: header {header!r} must contain exactly the feature names "
                f"{list(named.names)!r}"
            )
        columns = [named.index(h) for h in header]
        counts = [[0] * len(domain) for domain in space.domains]
        rows = 0
        for line, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise SchemaError(f"{path}: row {line} has {len(record)} cells, expected {len(header)}")
            for cell, feature in zip(record, columns):
                value = cell.strip()
                try:
                    pos = space.position(feature, value)
                except ValueError:
                    raise SchemaError(
                        f"{path}: row {line}, column {named.names[feature]!r}: "
                        f"value {value!r} is not a declared domain value"
                    ) from None
                counts[feature][pos] += 1
            rows += 1
    if rows == 0:
        raise SchemaError(f"{path}: no data rows")
    probs = [[Fraction(c, rows) for c in row] for row in counts]
    return ProductDistribution(space, probs), rows


# ---------------------------------------------------------------------------
# report helpers


def _fmt_all(values: Sequence[Fraction]) -> list[str]:
    return [format_rational(v) for v in values]


def _decimals(values: Sequence[Fraction]) -> list[str]:
    return [decimal_string(v) for v in values]


def _instance_echo(named: NamedSpace, e: Instance) -> dict:
    return {name: e[i] for i, name in enumerate(named.names)}


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _load_inline_or_file(raw: str, what: str):
    text = raw.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"inline {what} is not valid JSON: {exc}") from None
    return _load_json(raw)


def _thread_count() -> int:
    raw = os.environ.get("POWERDEX_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise SchemaError("POWERDEX_THREADS must be a positive integer") from None
    if threads < 1:
        raise SchemaError("POWERDEX_THREADS must be a positive integer")
    return threads


def _load_common(args) -> tuple[NamedSpace, Model, ProductDistribution, Instance]:
    named, model = load_model_file(args.model)
    if (args.dist is None) == (getattr(args, "from_csv", None) is None):
        raise SchemaError("exactly one of --dist and --from-csv is required")
    if args.dist is not None:
        dist = parse_distribution(_load_json(args.dist), named, args.dist)
    else:
        dist, _ = ingest_csv(args.from_csv, named)
    e = parse_instance(_load_inline_or_file(args.instance, "instance"), named)
    return named, model, dist, e


def _parse_set(arg: str, named: NamedSpace) -> Coalition:
    names = [part.strip() for part in arg.split(",") if part.strip()]
    if not names:
        raise SchemaError("--set needs at least one feature name")
    if len(set(names)) != len(names):
        raise SchemaError("--set contains duplicate feature names")
    return Coalition.from_members(named.index(name) for name in names)


# ---------------------------------------------------------------------------
# subcommands


def cmd_attribute(args) -> int:
    named, model, dist, e = _load_common(args)
    scheme = parse_scheme(_load_inline_or_file(args.scheme, "scheme"), named.space.n)
    report = attribute_all(model, dist, e, scheme, threads=_thread_count())
    doc = {
        "command": "attribute",
        "features": list(named.names),
        "instance": _instance_echo(named, e),
        "scheme": scheme_descriptor(scheme),
        "path": report.path,
        "engine_calls": list(report.engine_calls),
        "values": _fmt_all(report.values),
        "decimals": _decimals(report.values),
    }
    if args.diag and report.path == "interpolation":
        doc["coefficient_sums"] = [
            _fmt_all(interpolate_coefficients(model, dist, e, a))
            for a in range(named.space.n)
        ]
    _emit(doc, args.out)
    return EXIT_OK


def cmd_interact(args) -> int:
    named, model, dist, e = _load_common(args)
    a_set = _parse_set(args.set, named)
    scheme = parse_interaction_scheme(
        _load_inline_or_file(args.scheme, "scheme"), named.space.n
    )
    counted = CountingModel(model)
    if isinstance(scheme, InteractionWeights):
        value = compute_interaction_simple(counted, dist, e, a_set, scheme)
        path = PATH_BIVARIATE
    else:
        value = compute_interaction_bernoulli(counted, dist, e, a_set, scheme)
        path = PATH_BERNOULLI
    doc = {
        "command": "interact",
        "features": list(named.names),
        "instance": _instance_echo(named, e),
        "set": [named.names[i] for i in a_set],
        "scheme": scheme_descriptor(scheme),
        "path": path,
        "engine_calls": counted.expected_value_calls,
        "value": format_rational(value),
        "decimal": decimal_string(value),
    }
    if args.diag and isinstance(scheme, InteractionWeights):
        grid = BivariateGrid.default(named.space.n, len(a_set))
        doc["grid"] = {
            "z": _fmt_all(grid.z_nodes),
            "y": _fmt_all(grid.y_nodes),
        }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_expected(args) -> int:
    named, model = load_model_file(args.model)
    if (args.dist is None) == (args.from_csv is None):
        raise SchemaError("exactly one of --dist and --from-csv is required")
    if args.dist is not None:
        dist = parse_distribution(_load_json(args.dist), named, args.dist)
    else:
        dist, _ = ingest_csv(args.from_csv, named)
    value = model.expected_value(dist)
    _emit(
        {
            "command": "expected",
            "value": format_rational(value),
            "decimal": decimal_string(value),
        },
        args.out,
    )
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    named, model, dist, e = _load_common(args)
    n = named.space.n
    # the scheme is fully validated before any comparison runs
    a_set = _parse_set(args.set, named) if args.set is not None else None
    if a_set is not None:
        scheme = parse_interaction_scheme(_load_inline_or_file(args.scheme, "scheme"), n)
    else:
        scheme = parse_scheme(_load_inline_or_file(args.scheme, "scheme"), n)

    checks = []

    def record(quantity: str, fast: Fraction, brute: Fraction):
        checks.append(
            {
                "quantity": quantity,
                "engine": format_rational(fast),
                "oracle": format_rational(brute),
                "equal": fast == brute,
            }
        )

    record("expected-value", model.expected_value(dist), brute_expectation(model, dist))
    table = conditional_table(model, dist, e)
    doc = {"command": "oracle-check"}
    if a_set is not None:
        label = ",".join(named.names[i] for i in a_set)
        if isinstance(scheme, InteractionWeights):
            fast = compute_interaction_simple(model, dist, e, a_set, scheme)
        else:
            fast = compute_interaction_bernoulli(model, dist, e, a_set, scheme)
        record(
            f"interaction-index[{label}]",
            fast,
            brute_interaction_index(model, dist, e, a_set, scheme, table=table),
        )
        doc["set"] = [named.names[i] for i in a_set]
    else:
        for a in range(n):
            if isinstance(scheme, SimpleWeights):
                fast = compute_simple_index(model, dist, e, a, scheme)
                brute = brute_simple_index(model, dist, e, a, scheme, table=table)
            else:
                fast = compute_bernoulli_index(model, dist, e, a, scheme)
                brute = brute_bernoulli_index(model, dist, e, a, scheme, table=table)
            record(f"index[{named.names[a]}]", fast, brute)
    doc["scheme"] = scheme_descriptor(scheme)
    doc["checks"] = checks
    doc["all_equal"] = all(c["equal"] for c in checks)
    _emit(doc, args.out)
    return EXIT_OK if doc["all_equal"] else EXIT_MISMATCH


def cmd_converse(args) -> int:
    named, model, dist, e = _load_common(args)
    n = named.space.n
    scheme = parse_scheme(_load_inline_or_file(args.scheme, "scheme"), n)
    if not isinstance(scheme, SimpleWeights):
        raise WeightError("the converse reduction needs a cardinality-based scheme")
    system = ConverseSystem(scheme)
    oracle = index_engine_oracle(model, e, scheme)
    diagnostics = recover_expectation_detailed(
        system, oracle, dist, e, model.evaluate(e)
    )
    direct = model.expected_value(dist)
    doc = {
        "command": "converse",
        "features": list(named.names),
        "instance": _instance_echo(named, e),
        "scheme": scheme_descriptor(scheme),
        "nodes": _fmt_all(diagnostics.nodes),
        "theta_samples": _fmt_all(diagnostics.theta_samples),
        "recovered_expectation": format_rational(diagnostics.expected_value),
        "direct_expectation": format_rational(direct),
        "recovery_matches_engine": diagnostics.expected_value == direct,
        "coefficients": _fmt_all(diagnostics.coefficients),
    }
    try:
        sums = brute_coalition_sums(model, dist, e)
    except BudgetExceededError:
        sums = None
    if sums is not None:
        doc["coalition_sums_oracle"] = _fmt_all(sums)
        doc["coefficients_match_oracle"] = list(diagnostics.coefficients) == list(sums)
    _emit(doc, args.out)
    ok = doc["recovery_matches_engine"] and doc.get("coefficients_match_oracle", True)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_ingest(args) -> int:
    named, _model = load_model_file(args.model)
    dist, _rows = ingest_csv(args.from_csv, named)
    doc = {
        "marginals": [
            {
                "feature": name,
                "values": list(named.space.domains[i]),
                "probs": _fmt_all(dist.probs[i]),
            }
            for i, name in enumerate(named.names)
        ]
    }
    _emit(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerdex",
        description="Exact power-index feature attribution over finite feature domains.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, instance=True, scheme=True, dist=True):
        p.add_argument("--model", required=True, help="model JSON file")
        if dist:
            p.add_argument("--dist", help="distribution JSON file")
            p.add_argument(
                "--from-csv", dest="from_csv", help="CSV file of observed rows"
            )
        if instance:
            p.add_argument(
                "--instance", required=True, help="instance JSON (inline or a file path)"
            )
        if scheme:
            p.add_argument(
                "--scheme", required=True, help="scheme JSON (inline or a file path)"
            )
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--diag", action="store_true", help="include extra diagnostics")

    p = sub.add_parser("attribute", help="per-feature indices for one instance")
    add_common(p)
    p.set_defaults(func=cmd_attribute)

    p = sub.add_parser("interact", help="interaction index for a feature set")
    add_common(p)
    p.add_argument("--set", required=True, help="comma-separated feature names")
    p.set_defaults(func=cmd_interact)

    p = sub.add_parser("oracle-check", help="compare fast paths against brute force")
    add_common(p)
    p.add_argument("--set", help="check an interaction index for this feature set")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("converse", help="recover E[F] from the index oracle (self-check)")
    add_common(p)
    p.set_defaults(func=cmd_converse)

    p = sub.add_parser("expected", help="expected value of the model")
    add_common(p, instance=False, scheme=False)
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("ingest", help="estimate empirical marginals from a CSV")
    p.add_argument("--model", required=True, help="model JSON file (supplies the space)")
    p.add_argument("--from-csv", dest="from_csv", required=True, help="CSV file")
    p.add_argument("--out", help="write the distribution here instead of stdout")
    p.set_defaults(func=cmd_ingest)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (WeightError, SpaceMismatchError, ConverseInapplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEME
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
