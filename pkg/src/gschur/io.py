"""JSON document formats.

Every document is a JSON object with a ``format`` tag of the form
``gschur/<kind>@1``.  Complex numbers are ``[re, im]`` pairs; floats are written
with ``repr`` precision so documents re-parse bit for bit.

=========  ==================================================================
kind       fields
=========  ==================================================================
algebra    ``dim``; ``structure`` (dim x dim x dim nested pairs, ``c[i][j][k]``);
           optional ``unit`` (dim pairs); optional ``labels``
product    ``alg_a``, ``alg_b`` (inline algebra documents or ``{"ref": path}``,
           relative to the product file); ``va``, ``vb`` (matrix objects)
matrix     ``shape`` ``[n, m]``; ``entries`` (row-major pairs)
tuple      ``shape``; ``matrices`` (list of row-major pair lists)
tensor     ``n``, ``m``; ``entries``: ``(nm)^3`` pairs ordered row-major over
           (output, left, right), each index a column-major vec index
series     ``num_vars``; ``terms``: ``[{"word": [1, 2], "coeff": [re, im]}, ...]``
witness    ``product``, ``tuple``, ``series``, ``epsilon``, ``negative_word``,
           ``certificate``, ``min_eig_of_fX``, ``at_floor``, ``max_word_length``
=========  ==================================================================
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraError, StructureAlgebra, check_algebra, make_algebra
from .product import GeneralizedSchurProduct, make_product
from .series import NcPowerSeries

VERSION = 1


class FormatError(ValueError):
    pass


class ValidationError(ValueError):
    pass


def tag(kind: str) -> str:
    return f"gschur/{kind}@{VERSION}"


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def loads(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: top level must be an object")
    return doc


def read_document(path: Union[str, os.PathLike], kind: Optional[str] = None) -> dict:
    path = Path(path)
    doc = loads(path.read_text(), str(path))
    if kind is not None:
        expect_kind(doc, kind, str(path))
    return doc


def write_document(doc: dict, path: Union[str, os.PathLike]) -> None:
    Path(path).write_text(dumps(doc))


def expect_kind(doc: dict, kind: str, source: str = "<input>") -> None:
    fmt = doc.get("format")
    if fmt != tag(kind):
        raise FormatError(f"{source}: expected format {tag(kind)!r}, found {fmt!r}")


# ---------------------------------------------------------------------------
# numbers


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair: Any, where: str) -> complex:
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
        raise FormatError(f"{where}: malformed complex number {pair!r}, expected [re, im]")
    return complex(float(pair[0]), float(pair[1]))


def encode_array(a: np.ndarray):
    a = np.asarray(a)
    if a.ndim == 0:
        return encode_complex(a)
    return [encode_array(x) for x in a]


def decode_array(obj: Any, shape: tuple, where: str) -> np.ndarray:
    if not shape:
        return np.complex128(decode_complex(obj, where))
    if not isinstance(obj, list) or len(obj) != shape[0]:
        raise FormatError(f"{where}: expected a list of length {shape[0]}")
    return np.array([decode_array(x, shape[1:], f"{where}[{i}]") for i, x in enumerate(obj)],
                    dtype=np.complex128).reshape(shape)


def _field(doc: dict, name: str, where: str):
    if name not in doc:
        raise FormatError(f"{where}: missing field {name!r}")
    return doc[name]


def encode_matrix(X) -> dict:
    X = np.asarray(X, dtype=np.complex128)
    return {"shape": list(X.shape), "entries": [encode_complex(z) for z in X.reshape(-1)]}


def decode_matrix(obj: dict, where: str = "matrix") -> np.ndarray:
    shape = _field(obj, "shape", where)
    entries = _field(obj, "entries", where)
    if not (isinstance(shape, list) and len(shape) == 2 and all(isinstance(s, int) and s > 0 for s in shape)):
        raise FormatError(f"{where}.shape: expected [n, m] with positive integers")
    n, m = shape
    if not isinstance(entries, list) or len(entries) != n * m:
        raise FormatError(f"{where}.entries: expected {n * m} entries")
    vals = [decode_complex(p, f"{where}.entries[{i}]") for i, p in enumerate(entries)]
    return np.array(vals, dtype=np.complex128).reshape(n, m)


# ---------------------------------------------------------------------------
# algebras


def algebra_to_doc(alg: StructureAlgebra, include_unit: bool = True) -> dict:
    doc = {"format": tag("algebra"), "dim": alg.dim, "structure": encode_array(alg.structure)}
    if include_unit:
        doc["unit"] = encode_array(alg.unit)
    if alg.labels is not None:
        doc["labels"] = list(alg.labels)
    return doc


def algebra_from_doc(doc: dict, validate: bool = True, tol: float = DEFAULT_TOL,
                     where: str = "algebra") -> StructureAlgebra:
    expect_kind(doc, "algebra", where)
    dim = _field(doc, "dim", where)
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{where}.dim: expected a positive integer")
    c = decode_array(_field(doc, "structure", where), (dim, dim, dim), f"{where}.structure")
    unit = None
    if "unit" in doc:
        unit = decode_array(doc["unit"], (dim,), f"{where}.unit")
    labels = doc.get("labels")
    try:
        alg = make_algebra(c, unit, labels, tol=tol)
    except AlgebraError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    if validate:
        report = check_algebra(alg, tol)
        if not report.passed:
            raise ValidationError(
                f"{where}: associativity residual {report.associativity_residual:.3e}, "
                f"unit residual {report.unit_residual:.3e} (tol {tol:.1e})")
    return alg


def parse_algebra(path, validate: bool = True, tol: float = DEFAULT_TOL) -> StructureAlgebra:
    return algebra_from_doc(read_document(path), validate, tol, str(path))


# ---------------------------------------------------------------------------
# products


def product_to_doc(gsp: GeneralizedSchurProduct) -> dict:
    return {
        "format": tag("product"),
        "alg_a": algebra_to_doc(gsp.alg_a),
        "alg_b": algebra_to_doc(gsp.alg_b),
        "va": encode_matrix(gsp.va),
        "vb": encode_matrix(gsp.vb),
    }


def product_from_doc(doc: dict, base: Optional[Path] = None, validate: bool = True,
                     tol: float = DEFAULT_TOL, where: str = "product") -> GeneralizedSchurProduct:
    expect_kind(doc, "product", where)
    algs = []
    for name in ("alg_a", "alg_b"):
        sub = _field(doc, name, where)
        if isinstance(sub, dict) and "ref" in sub:
            ref = Path(sub["ref"])
            if base is not None and not ref.is_absolute():
                ref = base / ref
            sub = read_document(ref)
            algs.append(algebra_from_doc(sub, validate, tol, str(ref)))
        else:
            algs.append(algebra_from_doc(sub, validate, tol, f"{where}.{name}"))
    va = decode_matrix(_field(doc, "va", where), f"{where}.va")
    vb = decode_matrix(_field(doc, "vb", where), f"{where}.vb")
    try:
        return make_product(algs[0], algs[1], va, vb, tol=tol, validate=False)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def parse_product(path, validate: bool = True, tol: float = DEFAULT_TOL) -> GeneralizedSchurProduct:
    path = Path(path)
    return product_from_doc(read_document(path), path.parent, validate, tol, str(path))


# ---------------------------------------------------------------------------
# matrices and tuples


def matrix_to_doc(X) -> dict:
    return {"format": tag("matrix"), **encode_matrix(X)}


def tuple_to_doc(Xs) -> dict:
    Xs = [np.asarray(X, dtype=np.complex128) for X in Xs]
    return {
        "format": tag("tuple"),
        "shape": list(Xs[0].shape),
        "matrices": [[encode_complex(z) for z in X.reshape(-1)] for X in Xs],
    }


def tuple_from_doc(doc: dict, where: str = "tuple") -> tuple[np.ndarray, ...]:
    fmt = doc.get("format")
    if fmt == tag("matrix"):
        return (decode_matrix(doc, where),)
    expect_kind(doc, "tuple", where)
    shape = _field(doc, "shape", where)
    mats = _field(doc, "matrices", where)
    if not isinstance(mats, list) or not mats:
        raise FormatError(f"{where}.matrices: expected a nonempty list")
    return tuple(decode_matrix({"shape": shape, "entries": e}, f"{where}.matrices[{i}]")
                 for i, e in enumerate(mats))


def parse_matrix(path) -> np.ndarray:
    doc = read_document(path)
    expect_kind(doc, "matrix", str(path))
    return decode_matrix(doc, str(path))


def parse_matrix_tuple(path) -> tuple[np.ndarray, ...]:
    return tuple_from_doc(read_document(path), str(path))


# ---------------------------------------------------------------------------
# tensors


def tensor_to_doc(P) -> dict:
    return {"format": tag("tensor"), "n": P.n, "m": P.m,
            "entries": [encode_complex(z) for z in P.data.reshape(-1)]}


def tensor_from_doc(doc: dict, where: str = "tensor"):
    from .ropp import BilinearProductTensor

    expect_kind(doc, "tensor", where)
    n, m = _field(doc, "n", where), _field(doc, "m", where)
    N = n * m
    entries = _field(doc, "entries", where)
    if not isinstance(entries, list) or len(entries) != N**3:
        raise FormatError(f"{where}.entries: expected {N ** 3} entries")
    vals = [decode_complex(p, f"{where}.entries[{i}]") for i, p in enumerate(entries)]
    return BilinearProductTensor(n, m, np.array(vals, dtype=np.complex128).reshape(N, N, N))


def parse_tensor(path):
    return tensor_from_doc(read_document(path), str(path))


# ---------------------------------------------------------------------------
# series


def series_to_doc(series: NcPowerSeries) -> dict:
    return {
        "format": tag("series"),
        "num_vars": series.num_vars,
        "terms": [{"word": list(w), "coeff": encode_complex(c)} for w, c in series.coeffs.items()],
    }


def series_from_doc(doc: dict, where: str = "series") -> NcPowerSeries:
    expect_kind(doc, "series", where)
    d = _field(doc, "num_vars", where)
    terms = _field(doc, "terms", where)
    if not isinstance(terms, list):
        raise FormatError(f"{where}.terms: expected a list")
    coeffs = {}
    for i, t in enumerate(terms):
        here = f"{where}.terms[{i}]"
        word = _field(t, "word", here)
        if not isinstance(word, list) or not all(isinstance(x, int) for x in word):
            raise FormatError(f"{here}.word: expected a list of integers")
        coeffs[tuple(word)] = coeffs.get(tuple(word), 0j) + decode_complex(_field(t, "coeff", here), f"{here}.coeff")
    try:
        return NcPowerSeries(d, coeffs)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def parse_series(path) -> NcPowerSeries:
    return series_from_doc(read_document(path), str(path))


# ---------------------------------------------------------------------------
# certificates and witnesses


def certificate_from_dict(d: dict):
    from .spectral import ContractionCertificate, JsrEstimate, Verdict

    return ContractionCertificate(
        decode_matrix(d["A"], "certificate.A"),
        decode_matrix(d["B"], "certificate.B"),
        list(d["min_eigs"]),
        None if d["jsr"] is None else JsrEstimate.from_dict(d["jsr"]),
        Verdict(d["verdict"]),
        d["tol"],
        d.get("note", ""),
    )


def witness_to_doc(w, series: NcPowerSeries) -> dict:
    return {
        "format": tag("witness"),
        "product": product_to_doc(w.gsp),
        "tuple": tuple_to_doc(w.Xs),
        "series": series_to_doc(series),
        "epsilon": w.epsilon,
        "negative_word": list(w.negative_word),
        "certificate": w.certificate.to_dict(),
        "min_eig_of_fX": w.min_eig_of_fX,
        "at_floor": w.at_floor,
        "max_word_length": w.max_word_length,
    }


def witness_from_doc(doc: dict, where: str = "witness"):
    from .schoenberg import SchoenbergWitness

    expect_kind(doc, "witness", where)
    try:
        w = SchoenbergWitness(
            product_from_doc(doc["product"], where=f"{where}.product"),
            tuple_from_doc(doc["tuple"], f"{where}.tuple"),
            float(doc["epsilon"]),
            tuple(doc["negative_word"]),
            certificate_from_dict(doc["certificate"]),
            float(doc["min_eig_of_fX"]),
            bool(doc["at_floor"]),
            int(doc["max_word_length"]),
        )
    except KeyError as exc:
        raise FormatError(f"{where}: missing field {exc.args[0]!r}") from None
    return w, series_from_doc(doc["series"], f"{where}.series")


def parse_witness(path):
    return witness_from_doc(read_document(path), str(path))
