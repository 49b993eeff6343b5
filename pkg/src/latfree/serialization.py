"""JSON interchange for problems, certificates and flip traces.

All scalars travel as rational text ("p/q", an integer, or a finite
decimal); floats from black-box runs use their shortest repr, which
parses back exactly.  Problems are tied to certificates through a
canonical-form hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from .engine import Certificate, CaseId, FlipTrace
from .errors import NotUnimodular
from .geometry import GpSystem
from .lattice import UnimodularSet
from .numerics import EXACT, SignPolicy, format_scalar, parse_scalar, tolerance_policy
from .oracles import MixedQuadraticModel, QuadraticModel, reduce_mixed


class ProblemFormatError(ValueError):
    """The problem or certificate JSON is malformed."""


def _scalar_from_json(value):
    if isinstance(value, bool):
        raise ProblemFormatError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return parse_scalar(str(value))
    if isinstance(value, str):
        try:
            return parse_scalar(value)
        except ValueError as exc:
            raise ProblemFormatError(str(exc)) from exc
    raise ProblemFormatError(
        f"scalars must be integers or rational strings, got {value!r}"
    )


def _matrix_from_json(rows):
    if not isinstance(rows, list):
        raise ProblemFormatError(f"expected a matrix, got {rows!r}")
    return [_vector_from_json(row) for row in rows]


def _vector_from_json(values):
    if not isinstance(values, list):
        raise ProblemFormatError(f"expected a list of scalars, got {values!r}")
    return [_scalar_from_json(v) for v in values]


@dataclass
class LoadedProblem:
    """A parsed problem: the oracle to solve plus run parameters.

    ``oracle`` is always the two-variable quadratic actually handed to
    the solver; for mixed objectives it is the exact reduction and
    ``mixed`` keeps the original model (for x-recovery).
    """

    oracle: QuadraticModel
    initial: UnimodularSet
    policy: SignPolicy
    mixed: Optional[MixedQuadraticModel]
    raw: dict


def load_problem(data: dict) -> LoadedProblem:
    try:
        objective = data["objective"]
        obj_type = objective["type"]
        if obj_type == "quadratic":
            model = QuadraticModel(
                _matrix_from_json(objective["Q"]),
                _vector_from_json(objective["c"]),
                _scalar_from_json(objective.get("d", 0)),
            )
            mixed = None
        elif obj_type == "mixed_quadratic":
            mixed = MixedQuadraticModel(
                _matrix_from_json(objective["A"]),
                _matrix_from_json(objective["B"]),
                _matrix_from_json(objective["C"]),
                _vector_from_json(objective["a"]),
                _vector_from_json(objective["c"]),
            )
            model = reduce_mixed(mixed)
        else:
            raise ProblemFormatError(f"unknown objective type {obj_type!r}")
        initial = UnimodularSet.from_json(data["initial"])
        policy = _policy_from_json(data.get("policy"))
    except ProblemFormatError:
        raise
    except (KeyError, TypeError, IndexError, ValueError, NotUnimodular) as exc:
        raise ProblemFormatError(f"malformed problem: {exc!r}") from exc
    return LoadedProblem(oracle=model, initial=initial, policy=policy,
                         mixed=mixed, raw=data)


def _policy_from_json(data) -> SignPolicy:
    if data is None:
        return EXACT
    mode = data.get("mode", "exact")
    if mode == "exact":
        return EXACT
    if mode == "tolerance":
        tau = data.get("tau")
        return tolerance_policy() if tau is None else tolerance_policy(
            float(_scalar_from_json(tau)))
    raise ProblemFormatError(f"unknown policy mode {mode!r}")


def policy_to_json(policy: SignPolicy) -> dict:
    if policy.is_exact:
        return {"mode": "exact"}
    return {"mode": "tolerance", "tau": format_scalar(policy.tau)}


def problem_hash(data: dict) -> str:
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _halfspaces_to_json(halfspaces):
    return [{"w": list(w), "grad": [format_scalar(g[0]), format_scalar(g[1])]}
            for w, g in halfspaces]


def _halfspaces_from_json(items):
    return tuple(
        (tuple(entry["w"]),
         (_scalar_from_json(entry["grad"][0]), _scalar_from_json(entry["grad"][1])))
        for entry in items
    )


def _trace_entry_to_json(entry: FlipTrace) -> dict:
    return {
        "iteration": entry.iteration,
        "before": entry.before.to_json(),
        "case": entry.case.value,
        "side": entry.side,
        "k": entry.k,
        "after": entry.after.to_json(),
        "f_before": format_scalar(entry.f_before),
        "f_after": format_scalar(entry.f_after),
        "inner_product_evals": entry.inner_product_evals,
        "halfspaces": _halfspaces_to_json(entry.halfspaces),
    }


def _trace_entry_from_json(data: dict) -> FlipTrace:
    return FlipTrace(
        iteration=data["iteration"],
        before=UnimodularSet.from_json(data["before"]),
        case=CaseId(data["case"]),
        side=data["side"],
        k=data["k"],
        after=UnimodularSet.from_json(data["after"]),
        f_before=_scalar_from_json(data["f_before"]),
        f_after=_scalar_from_json(data["f_after"]),
        inner_product_evals=data["inner_product_evals"],
        halfspaces=_halfspaces_from_json(data["halfspaces"]),
    )


def certificate_to_json(cert: Certificate, problem_digest: str) -> dict:
    return {
        "status": cert.status,
        "problem_hash": problem_digest,
        "final_set": cert.final_set.to_json(),
        "argmin": {"point": list(cert.argmin_point),
                   "f": format_scalar(cert.argmin_value)},
        "halfspaces": _halfspaces_to_json(cert.gp.halfspaces),
        "iterations": cert.iterations,
        "trace": [_trace_entry_to_json(t) for t in cert.trace],
    }


def certificate_from_json(data: dict) -> tuple:
    """Parse a certificate; returns (certificate, stored problem hash)."""
    try:
        cert = Certificate(
            status=data["status"],
            final_set=UnimodularSet.from_json(data["final_set"]),
            argmin_point=tuple(data["argmin"]["point"]),
            argmin_value=_scalar_from_json(data["argmin"]["f"]),
            gp=GpSystem(_halfspaces_from_json(data["halfspaces"])),
            iterations=data["iterations"],
            trace=tuple(_trace_entry_from_json(t) for t in data["trace"]),
        )
        return cert, data["problem_hash"]
    except (KeyError, TypeError, IndexError) as exc:
        raise ProblemFormatError(f"malformed certificate: {exc!r}") from exc


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
