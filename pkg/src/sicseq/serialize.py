"""JSON and CSV formats for operators, kets, POMs, schemes, circuits and reports.

Floats are written with ``repr`` precision, so every value round-trips bit-exactly.
"""

import csv
import io
import json

import numpy as np

from .fuzzy import AnsatzScheme, FuzzyParams
from .optics import BeamSplitter, Circuit, PhaseShifter
from .povm import POM, Basis, KrausSet, SequentialScheme


class FormatError(ValueError):
    pass


def _pairs(values):
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


def _complex(entries, n, what):
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: entries must be [re, im] pairs") from exc
    if arr.size != n:
        raise FormatError(f"{what}: expected {n} entries, got {arr.size}")
    return arr


def operator_to_json(a):
    a = np.asarray(a, dtype=complex)
    return {"dim": int(a.shape[0]), "entries": _pairs(a)}


def operator_from_json(obj):
    try:
        d = int(obj["dim"])
        return _complex(obj["entries"], d * d, "operator").reshape(d, d)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed operator: {exc}") from exc


def ket_to_json(v):
    v = np.asarray(v, dtype=complex)
    return {"dim": int(v.size), "entries": _pairs(v)}


def ket_from_json(obj):
    try:
        return _complex(obj["entries"], int(obj["dim"]), "ket")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed ket: {exc}") from exc


def label_to_str(label):
    if isinstance(label, tuple):
        return ",".join(str(x) for x in label)
    return str(label)


def label_from_str(text):
    parts = str(text).split(",")
    try:
        nums = tuple(int(p) for p in parts)
    except ValueError:
        return str(text)
    return nums if len(nums) > 1 else nums[0]


def pom_to_json(pom):
    return {
        "dim": pom.dim,
        "labels": [label_to_str(lab) for lab in pom.labels],
        "outcomes": [operator_to_json(o) for o in pom.outcomes],
    }


def pom_from_json(obj):
    try:
        outcomes = tuple(operator_from_json(o) for o in obj["outcomes"])
        labels = tuple(label_from_str(lab) for lab in obj.get("labels", range(len(outcomes))))
        d = int(obj["dim"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed POM: {exc}") from exc
    if any(o.shape != (d, d) for o in outcomes):
        raise FormatError("POM outcome dimension does not match 'dim'")
    return POM(outcomes, labels)


def scheme_to_json(scheme):
    if isinstance(scheme, AnsatzScheme):
        return {
            "dim": scheme.d,
            "lambda": float(scheme.params.lam),
            "bases": [[ket_to_json(k) for k in b.kets] for b in scheme.bases],
        }
    return {
        "dim": scheme.dim,
        "first": [operator_to_json(a) for a in scheme.first],
        "second": [[ket_to_json(k) for k in b.kets] for b in scheme.second],
    }


def scheme_from_json(obj):
    """SequentialScheme, or AnsatzScheme when the object carries 'lambda'."""
    try:
        d = int(obj["dim"])
        if "lambda" in obj:
            bases = tuple(Basis(tuple(ket_from_json(k) for k in b)) for b in obj["bases"])
            return AnsatzScheme(FuzzyParams(d, float(obj["lambda"])), bases)
        first = KrausSet(tuple(operator_from_json(a) for a in obj["first"]))
        second = tuple(Basis(tuple(ket_from_json(k) for k in b)) for b in obj["second"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed scheme: {exc}") from exc
    if first.dim != d:
        raise FormatError("scheme Kraus dimension does not match 'dim'")
    return SequentialScheme(first, second)


def circuit_to_json(circ):
    elements = []
    for el in circ.elements:
        if isinstance(el, PhaseShifter):
            elements.append({"type": "ps", "mode": el.mode, "phase": float(el.phase)})
        else:
            t, r = complex(el.t), complex(el.r)
            elements.append({"type": "bs", "a": el.a, "b": el.b, "t": [t.real, t.imag], "r": [r.real, r.imag]})
    return {"modes": circ.modes, "elements": elements}


def circuit_from_json(obj):
    try:
        circ = Circuit(int(obj["modes"]))
        for el in obj["elements"]:
            if el["type"] == "ps":
                circ.append(PhaseShifter(int(el["mode"]), float(el["phase"])))
            elif el["type"] == "bs":
                circ.append(BeamSplitter(int(el["a"]), int(el["b"]), complex(*el["t"]), complex(*el["r"])))
            else:
                raise FormatError(f"unknown element type {el['type']!r}")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed circuit: {exc}") from exc
    return circ


def dumps(obj):
    return json.dumps(obj, indent=1) + "\n"


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def table_to_csv(labels, values, column):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", column])
    for lab, v in zip(labels, values):
        w.writerow([label_to_str(lab), repr(float(v)) if column == "probability" else int(v)])
    return buf.getvalue()


def csv_to_table(text):
    """Rows of ``label,value``; returns (labels, values)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) != 2 or rows[0][0] != "label":
        raise FormatError("CSV must start with a 'label,<value>' header")
    labels, values = [], []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(f"bad CSV row {row}")
        try:
            values.append(float(row[1]))
        except ValueError as exc:
            raise FormatError(f"non-numeric value in row {row}") from exc
        labels.append(label_from_str(row[0]))
    return labels, np.array(values)
