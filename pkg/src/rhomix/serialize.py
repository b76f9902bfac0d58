"""Model files and report serialization.

Model files are JSON objects with the fields ``kind``, ``p``, ``k`` and the
matrices (row-major nested lists) ``A, sigma_xi`` for VAR(1) or
``Lambda, H, sigma_eta, sigma_xi`` for the factor model. Floats are written
with ``repr`` precision so a load reproduces the model bit for bit.
"""
import json

import numpy as np

from .errors import DimensionMismatch, OutOfRange
from .models import make_var1, make_varma11

VAR1_FIELDS = ("A", "sigma_xi")
VARMA_FIELDS = ("Lambda", "H", "sigma_eta", "sigma_xi")


def _rows(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def model_to_dict(model):
    d = {"kind": model.kind, "p": int(model.p), "k": int(model.k)}
    fields = VAR1_FIELDS if model.kind == "var1" else VARMA_FIELDS
    for name in fields:
        d[name] = _rows(getattr(model, name))
    return d


def model_from_dict(d):
    kind = d.get("kind")
    if kind is None:
        kind = "varma11" if "Lambda" in d else "var1"
    fields = VAR1_FIELDS if kind == "var1" else VARMA_FIELDS if kind == "varma11" else None
    if fields is None:
        raise OutOfRange("unknown model kind %r" % kind)
    missing = [f for f in fields if f not in d]
    if missing:
        raise DimensionMismatch("model file lacks field(s) %s" % ", ".join(missing))
    mats = [np.array(d[f], dtype=np.float64, ndmin=2) for f in fields]
    model = make_var1(*mats) if kind == "var1" else make_varma11(*mats)
    if "p" in d and int(d["p"]) != model.p:
        raise DimensionMismatch("declared p=%s but matrices have p=%d" % (d["p"], model.p))
    if kind == "varma11" and "k" in d and int(d["k"]) != model.k:
        raise DimensionMismatch("declared k=%s but Lambda has %d columns" % (d["k"], model.k))
    return model


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError("cannot serialize %r" % type(o))


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(dumps(model_to_dict(model)))


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def save_json(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
