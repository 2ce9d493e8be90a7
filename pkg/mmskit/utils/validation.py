"""Input validation utilities."""

from typing import Optional, Tuple

from ..core.exceptions import ValidationError
from ..core.rational import parse_rational


def _check_rationals(items, label: str) -> Optional[str]:
    for item in items:
        try:
            parse_rational(item)
        except ValidationError as e:
            return f"{label}: {str(e)}"
    return None


def validate_instance_input(data: dict) -> Tuple[bool, Optional[str]]:
    """
    Validates an instance payload {"values": [...], "k": K}.

    Args:
        data: Dictionary decoded from JSON

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "Instance payload must be a JSON object"
    values = data.get('values')
    if not isinstance(values, list) or not values:
        return False, "values must be a non-empty list"
    error = _check_rationals(values, "values")
    if error:
        return False, error
    if 'k' in data:
        k = data['k']
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= len(values):
            return False, f"k must be an integer with 1 <= k <= {len(values)}"
    return True, None


def family_arity(data: dict) -> Optional[int]:
    """Arity of a family payload: "k", or "r" for older hypergraph files."""
    return data.get('k', data.get('r'))


def validate_family_input(data: dict) -> Tuple[bool, Optional[str]]:
    """
    Validates a family/hypergraph payload {"n": N, "k": K, "edges": [[...], ...]}.

    Edges are 1-based index lists of length k inside [n]. "r" is read when
    "k" is absent.
    """
    if not isinstance(data, dict):
        return False, "Family payload must be a JSON object"
    n, k = data.get('n'), family_arity(data)
    if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool) or isinstance(k, bool):
        return False, "n and k must be integers"
    if n < 1 or k < 0:
        return False, "n must be positive and k nonnegative"
    edges = data.get('edges', [])
    if not isinstance(edges, list):
        return False, "edges must be a list"
    for edge in edges:
        if not isinstance(edge, list) or len(edge) != k or len(set(edge)) != k:
            return False, f"Edge {edge!r} is not a set of {k} indices"
        if not all(isinstance(i, int) and 1 <= i <= n for i in edge):
            return False, f"Edge {edge!r} leaves [1, {n}]"
    return True, None


def validate_query_input(data: dict) -> Tuple[bool, Optional[str]]:
    """
    Validates a deviation query {"distributions": [[[v, p], ...], ...], "threshold": t}.
    """
    if not isinstance(data, dict):
        return False, "Query payload must be a JSON object"
    dists = data.get('distributions')
    if not isinstance(dists, list) or not dists:
        return False, "distributions must be a non-empty list"
    if 'threshold' not in data:
        return False, "threshold is required"
    error = _check_rationals([data['threshold']], "threshold")
    if error:
        return False, error
    for dist in dists:
        if not isinstance(dist, list) or not dist:
            return False, "each distribution must be a non-empty list of atoms"
        for atom in dist:
            if not isinstance(atom, list) or len(atom) != 2:
                return False, f"Atom {atom!r} must be a [value, prob] pair"
            error = _check_rationals(atom, "atom")
            if error:
                return False, error
    return True, None


def validate_nk(n, k, divisible: bool = False) -> Tuple[bool, Optional[str]]:
    """Validates a pair of positive integers with k <= n (and k | n if asked)."""
    if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool) or isinstance(k, bool):
        return False, "n and k must be integers"
    if not 1 <= k <= n:
        return False, "n and k must satisfy 1 <= k <= n"
    if divisible and n % k:
        return False, "k must divide n"
    return True, None
