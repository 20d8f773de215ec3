"""Regenerate src/gerbelab/data/r3-prequantum.json."""

from pathlib import Path

import numpy as np

from gerbelab import canonical
from gerbelab.exterior import Poly, TWO_PI_I, VectorField, dx, x
from gerbelab.twovect import ModelSection

out = Path(__file__).resolve().parents[1] / "src" / "gerbelab" / "data" / "r3-prequantum.json"


def vf(*comps):
    return VectorField(list(comps)).to_json()


m = {
    "version": "1",
    "objects": {
        "rho": {"type": "form", "builtin": "r3_curving"},
        "vol3": {"type": "form", "builtin": "vol", "dim": 3},
        "R3": {"type": "plectic", "omega": "vol3"},
        "I_rho": {"type": "gerbe", "trivial": "rho"},
        "sphere": {"type": "surface", "icosphere": {"subdivisions": 4, "radius": 1.0}},
        "circle": {"type": "loop", "circle": {"N": 256, "radius": 1.0}},
        "A": {"type": "form", "form": (x(3, 1) * dx(3, 2) * (-TWO_PI_I)).to_json()},
        "alpha": {"type": "form", "form": (x(3, 3) * dx(3, 1)).to_json()},
        "beta": {"type": "form", "form": (x(3, 1) * dx(3, 2)).to_json()},
        "theta": {"type": "form", "form": (x(3, 2) * dx(3, 3)).to_json()},
        "Psi": {"type": "functional", "exp": {"theta": "theta"}},
        "X1": {"type": "vector_field", **vf(x(3, 2), Poly.const(3, 1), x(3, 1) * x(3, 3))},
        "X2": {"type": "vector_field", **vf(Poly.const(3, 1), x(3, 3), x(3, 2))},
        "zero": {"type": "section", "omega": ModelSection.zero(3, 1).to_json()["omega"]},
    },
    "tasks": [
        {"command": "validate", "refs": {"gerbe": "I_rho", "plectic": "R3"}, "params": {}},
        {"command": "curvature", "refs": {"gerbe": "I_rho", "plectic": "R3"}, "params": {}},
        {"command": "dd", "refs": {"gerbe": "I_rho"}, "params": {}},
        {"command": "hol-surface", "refs": {"gerbe": "I_rho", "surface": "sphere"},
         "params": {"expected": [float(np.cos(8 * np.pi ** 2 / 3)), float(np.sin(8 * np.pi ** 2 / 3))],
                    "tol": 1e-3}},
        {"command": "hol-line", "refs": {"form": "A", "loop": "circle"},
         "params": {"expected": [float(np.cos(2 * np.pi ** 2)), float(np.sin(2 * np.pi ** 2))], "tol": 1e-10}},
        {"command": "transgress", "refs": {"form": "rho", "loop": "circle", "fields": ["X1", "X2"]},
         "params": {"check": "chain_map", "eps": 1e-4, "tol": 1e-5}},
        {"command": "ks-check", "refs": {"plectic": "R3", "gerbe": "I_rho", "alpha": "alpha", "beta": "beta",
                                         "functional": "Psi", "loop": "circle"},
         "params": {"eps": 1e-3, "tol": 1e-3}},
        {"command": "homspace", "refs": {"source": "zero", "target": "zero"}, "params": {"degree": 2, "expected": 1}},
    ],
}

out.write_text(canonical.dumps(m))
print(out)
