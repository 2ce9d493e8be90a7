"""JSON formats for instances, hypergraphs, queries and reports."""

import csv
import io
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List

from ..core.exceptions import ValidationError
from ..core.rational import format_rational, parse_rational
from ..services.combinatorics import KSet, SetFamily
from ..services.constructions import CoverWitness
from ..services.deviations import DeviationQuery, DiscreteDistribution
from ..services.hypergraphs import Hypergraph
from ..services.ksum_analysis import Instance
from .validation import family_arity, validate_family_input, validate_instance_input, validate_query_input


def _raise_unless(result) -> None:
    is_valid, error = result
    if not is_valid:
        raise ValidationError(error)


def load_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {str(e)}")


def instance_from_json(data: Dict[str, Any]) -> Instance:
    _raise_unless(validate_instance_input(data))
    return Instance.from_values(data['values'])


def instance_to_json(inst: Instance) -> Dict[str, Any]:
    return {"values": inst.to_strings()}


def set_family_from_json(data: Dict[str, Any]) -> SetFamily:
    _raise_unless(validate_family_input(data))
    members = frozenset(KSet(tuple(e)) for e in data.get('edges', []))
    return SetFamily(data['n'], family_arity(data), members)


def set_family_to_json(family: SetFamily) -> Dict[str, Any]:
    return {
        "n": family.ground_n,
        "k": family.arity,
        "edges": [list(s.indices) for s in family.sorted_members()],
    }


def hypergraph_from_json(data: Dict[str, Any]) -> Hypergraph:
    family = set_family_from_json(data)
    if family.arity < 1:
        raise ValidationError("A hypergraph needs edges of size k >= 1")
    return Hypergraph(family.ground_n, family.arity, family, tuple(data.get('vertices', ())))


def hypergraph_to_json(H: Hypergraph) -> Dict[str, Any]:
    data = set_family_to_json(H.edges)
    data["vertices"] = list(H.vertices)
    return data


def cover_witness_to_json(w: CoverWitness) -> Dict[str, Any]:
    data = hypergraph_to_json(w.hypergraph)
    data["weights"] = [format_rational(v) for v in w.weights]
    data["total_weight"] = format_rational(w.total_weight)
    return data


def cover_witness_from_json(data: Dict[str, Any]) -> CoverWitness:
    H = hypergraph_from_json(data)
    weights = tuple(parse_rational(v) for v in data.get('weights', []))
    return CoverWitness(H, weights, sum(weights, Fraction(0)))


def query_from_json(data: Dict[str, Any]) -> DeviationQuery:
    _raise_unless(validate_query_input(data))
    dists = tuple(DiscreteDistribution.from_pairs(d) for d in data['distributions'])
    return DeviationQuery(dists, parse_rational(data['threshold']))


def to_jsonable(value: Any) -> Any:
    """Fractions become "p/q"; containers are converted recursively."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps(value: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators."""
    return json.dumps(to_jsonable(value), sort_keys=True, indent=2)


def render(rows: Iterable[Dict[str, Any]], output_format: str) -> str:
    """Render a list of flat-ish records as json, csv or an aligned table."""
    rows = [to_jsonable(r) for r in rows]
    if output_format == "json":
        return dumps(rows)
    columns: List[str] = sorted({c for r in rows for c in r})
    cells = [[_cell(r.get(c)) for c in columns] for r in rows]
    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buffer.getvalue().rstrip("\n")
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(line.rstrip() for line in lines)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)
