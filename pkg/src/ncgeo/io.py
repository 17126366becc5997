"""Text serialization: matrices as rows of [re, im] pairs, triples as JSON documents."""
from __future__ import annotations

import json

import numpy as np

from .triples import HochschildChain, SpectralTripleData

__all__ = [
    "matrix_to_data",
    "data_to_matrix",
    "vector_to_data",
    "data_to_vector",
    "triple_to_dict",
    "dict_to_triple",
    "module_to_dict",
    "dict_to_module",
    "save_triple",
    "load_triple",
    "FormatError",
]

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def matrix_to_data(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def data_to_matrix(data) -> np.ndarray:
    try:
        rows = [[complex(entry[0], entry[1]) for entry in row] for row in data]
    except (TypeError, IndexError) as exc:
        raise FormatError(f"bad matrix encoding: {exc}") from exc
    m = np.array(rows, dtype=complex)
    if m.ndim != 2:
        raise FormatError("matrix encoding must be a list of rows")
    return m


def vector_to_data(v) -> list:
    v = np.asarray(v, dtype=complex).ravel()
    return [[float(x.real), float(x.imag)] for x in v]


def data_to_vector(data) -> np.ndarray:
    try:
        return np.array([complex(e[0], e[1]) for e in data], dtype=complex)
    except (TypeError, IndexError) as exc:
        raise FormatError(f"bad vector encoding: {exc}") from exc


def triple_to_dict(t: SpectralTripleData) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "hilbert_dim": t.hilbert_dim,
        "p": t.declared_p,
        "algebra": {"generators": [matrix_to_data(g) for g in t.algebra_gens]},
        "dirac": matrix_to_data(t.dirac),
        "grading": matrix_to_data(t.grading) if t.grading is not None else None,
        "right_action": {"generators": [matrix_to_data(g) for g in t.right_action_gens]}
        if t.right_action_gens is not None else None,
        "cycle": None,
        "phi": vector_to_data(t.riemann_vector) if t.riemann_vector is not None else None,
        "state": matrix_to_data(t.state) if t.state is not None else None,
    }
    if t.orientation_cycle is not None:
        doc["cycle"] = {
            "degree": t.orientation_cycle.degree,
            "generalized": bool(t.orientation_cycle.generalized),
            "terms": [[matrix_to_data(m) for m in term] for term in t.orientation_cycle.terms],
        }
    return doc


def dict_to_triple(doc: dict) -> SpectralTripleData:
    try:
        version = doc["version"]
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {version}")
        n = int(doc["hilbert_dim"])
        gens = [data_to_matrix(g) for g in doc["algebra"]["generators"]]
        dirac = data_to_matrix(doc["dirac"])
        grading = data_to_matrix(doc["grading"]) if doc.get("grading") is not None else None
        right = None
        if doc.get("right_action") is not None:
            right = [data_to_matrix(g) for g in doc["right_action"]["generators"]]
        cycle = None
        if doc.get("cycle") is not None:
            c = doc["cycle"]
            cycle = HochschildChain(
                int(c["degree"]),
                [tuple(data_to_matrix(m) for m in term) for term in c["terms"]],
                bool(c.get("generalized", False)),
            )
        phi = data_to_vector(doc["phi"]) if doc.get("phi") is not None else None
        state = data_to_matrix(doc["state"]) if doc.get("state") is not None else None
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed triple document: {exc}") from exc
    return SpectralTripleData(
        hilbert_dim=n,
        algebra_gens=gens,
        dirac=dirac,
        grading=grading,
        declared_p=int(doc.get("p", 0)),
        right_action_gens=right,
        orientation_cycle=cycle,
        riemann_vector=phi,
        state=state,
    )


def module_to_dict(mod) -> dict:
    """Projective module document: base generators, size, projector/metric blocks."""
    return {
        "base_generators": [matrix_to_data(g) for g in mod.base.generator_matrices()],
        "m": mod.size,
        "q_blocks": matrix_to_data(mod.projector),
        "r_blocks": matrix_to_data(mod.metric),
        "side": mod.side,
    }


def dict_to_module(doc: dict):
    from .algebra import generate_algebra
    from .modules import ProjectiveModule
    try:
        base = generate_algebra([data_to_matrix(g) for g in doc["base_generators"]],
                                with_unit=True)
        return ProjectiveModule(
            base, int(doc["m"]), data_to_matrix(doc["q_blocks"]),
            data_to_matrix(doc["r_blocks"]), doc.get("side", "right"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed module document: {exc}") from exc


def save_triple(path, t: SpectralTripleData, extra: dict | None = None):
    doc = triple_to_dict(t)
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_triple(path):
    """Returns (triple, full document) so callers can read bundled extras."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON at line {exc.lineno}") from exc
    return dict_to_triple(doc), doc
