"""Manifests: named objects plus an ordered task list, and their reports.

A manifest is JSON of the form::

    {"version": "1",
     "objects": {"name": {"type": ..., ...payload}},
     "tasks": [{"command": ..., "refs": {role: name}, "params": {...}}]}

Parsing checks structure, field names and references only; objects are
built when a task needs them, so a mathematically broken object makes
its task fail without aborting the run.
"""

import json
import time
from importlib import resources

import numpy as np

from . import canonical
from .cech import Cover
from .errors import BadReference, CheckFailure, GerbelabError, InputError, ParseError, UnknownField
from .exterior import Poly, PolyForm, Scalar, VectorField, vol
from .gerbe import curvature_3form, dd_cocycle, gerbe_from_json, r3_curving, trivial_gerbe
from .plectic import make_plectic, prequantum_check
from .twovect import MatForm, ModelSection, hom_space, inner_product_hilbert, make_morphism

VERSION = "1"

# type -> (required fields, optional fields)
OBJECT_FIELDS = {
    "cover": ({"dim", "labels", "nerve"}, set()),
    "form": (set(), {"form", "builtin", "dim"}),
    "vector_field": ({"dim", "comps"}, set()),
    "gerbe": (set(), {"cover", "trivial", "g", "A", "B"}),
    "plectic": ({"omega"}, set()),
    "loop": (set(), {"samples", "closed", "circle"}),
    "surface": (set(), {"vertices", "triangles", "assignment", "icosphere", "polar_disc"}),
    "functional": (set(), {"terms", "exp"}),
    "morphism": ({"src", "tgt", "alpha", "a"}, {"fake_flat"}),
    "matform": ({"dim", "deg", "shape", "terms"}, set()),
    "section": ({"omega"}, set()),
}

# fields whose string values name other objects, with the admissible types
REF_FIELDS = {
    ("gerbe", "cover"): {"cover"},
    ("gerbe", "trivial"): {"form"},
    ("plectic", "omega"): {"form"},
    ("morphism", "src"): {"gerbe"},
    ("morphism", "tgt"): {"gerbe"},
}

# command -> (required roles, optional roles); values are admissible types
COMMANDS = {
    "validate": ({}, {"gerbe": {"gerbe"}, "morphism": {"morphism"}, "plectic": {"plectic"}}),
    "curvature": ({"gerbe": {"gerbe"}}, {"plectic": {"plectic"}}),
    "dd": ({"gerbe": {"gerbe"}}, {}),
    "hol-line": ({"form": {"form"}, "loop": {"loop"}}, {}),
    "hol-surface": ({"surface": {"surface"}}, {"gerbe": {"gerbe"}, "curving": {"form"}}),
    "hol-brane": ({"curving": {"form"}, "connection": {"matform", "morphism"}, "disc": {"surface"},
                   "boundary": {"loop"}}, {}),
    "transgress": ({"form": {"form"}, "loop": {"loop"}}, {"fields": {"vector_field"}}),
    "homspace": ({"source": {"section"}, "target": {"section"}}, {}),
    "ks-check": ({"plectic": {"plectic"}, "alpha": {"form"}, "beta": {"form"}, "functional": {"functional"},
                  "loop": {"loop"}}, {"gerbe": {"gerbe"}, "curving": {"form"}}),
    "suite": ({}, {}),
}

PARAMS = {"tol", "eps", "degree", "samples", "expected", "mode", "check", "richardson", "seed", "criteria",
          "label"}


class Manifest:
    """Parsed manifest; keeps the raw payloads for byte-stable serialization."""

    def __init__(self, version, objects, tasks):
        self.version = version
        self.objects = objects
        self.tasks = tasks
        self._built = {}

    def to_json(self):
        return {"version": self.version, "objects": self.objects, "tasks": self.tasks}

    def get(self, name):
        if name not in self._built:
            self._built[name] = _build(self, name)
        return self._built[name]


def serialize(manifest):
    return canonical.dumps(manifest.to_json())


def _expect(cond, msg, path):
    if not cond:
        raise ParseError(f"{path}: {msg}", details=[{"path": path}])


def parse_manifest(text):
    """Parse and structurally validate manifest text.

    Raises
    ------
    ParseError
        Malformed JSON or wrong shapes, with the offending path.
    UnknownField
        Unrecognized keys, types, commands, roles or parameters.
    BadReference
        Names that do not resolve to an object of an admissible type.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"$: invalid JSON ({e.msg} at line {e.lineno})", details=[{"path": "$"}]) from None
    _expect(isinstance(data, dict), "manifest must be an object", "$")
    extra = set(data) - {"version", "objects", "tasks"}
    if extra:
        raise UnknownField(f"$: unknown fields {sorted(extra)}", details=[{"path": "$", "fields": sorted(extra)}])
    version = data.get("version", VERSION)
    _expect(isinstance(version, str), "version must be a string", "$.version")
    objects = data.get("objects", {})
    tasks = data.get("tasks", [])
    _expect(isinstance(objects, dict), "objects must be an object", "$.objects")
    _expect(isinstance(tasks, list), "tasks must be a list", "$.tasks")
    for name, obj in objects.items():
        path = f"$.objects.{name}"
        _expect(isinstance(obj, dict), "object payload must be an object", path)
        typ = obj.get("type")
        if typ not in OBJECT_FIELDS:
            raise UnknownField(f"{path}.type: unknown object type {typ!r}", details=[{"path": path + ".type"}])
        req, opt = OBJECT_FIELDS[typ]
        keys = set(obj) - {"type"}
        extra = keys - req - opt
        if extra:
            raise UnknownField(f"{path}: unknown fields {sorted(extra)}", details=[{"path": path}])
        missing = req - keys
        _expect(not missing, f"missing fields {sorted(missing)}", path)
        for (t, field), allowed in REF_FIELDS.items():
            if t == typ and isinstance(obj.get(field), str):
                _check_ref(objects, obj[field], allowed, f"{path}.{field}")
        if typ == "morphism":
            for field in ("src", "tgt"):
                _expect(isinstance(obj[field], str), "must name a gerbe", f"{path}.{field}")
    for k, task in enumerate(tasks):
        path = f"$.tasks[{k}]"
        _expect(isinstance(task, dict), "task must be an object", path)
        extra = set(task) - {"command", "refs", "params"}
        if extra:
            raise UnknownField(f"{path}: unknown fields {sorted(extra)}", details=[{"path": path}])
        cmd = task.get("command")
        if cmd not in COMMANDS:
            raise UnknownField(f"{path}.command: unknown command {cmd!r}", details=[{"path": path + ".command"}])
        req, opt = COMMANDS[cmd]
        refs = task.get("refs", {})
        _expect(isinstance(refs, dict), "refs must be an object", path + ".refs")
        for role in refs:
            if role not in req and role not in opt:
                raise UnknownField(f"{path}.refs: unknown role {role!r} for {cmd}",
                                   details=[{"path": f"{path}.refs.{role}"}])
        for role in req:
            _expect(role in refs, f"missing role {role!r}", path + ".refs")
        for role, val in refs.items():
            allowed = req.get(role) or opt.get(role)
            names = val if isinstance(val, list) else [val]
            for name in names:
                _expect(isinstance(name, str), "references are object names", f"{path}.refs.{role}")
                _check_ref(objects, name, allowed, f"{path}.refs.{role}")
        params = task.get("params", {})
        _expect(isinstance(params, dict), "params must be an object", path + ".params")
        extra = set(params) - PARAMS
        if extra:
            raise UnknownField(f"{path}.params: unknown parameters {sorted(extra)}", details=[{"path": path}])
        _check_ranges(params, path + ".params")
    return Manifest(version, objects, tasks)


def _check_ref(objects, name, allowed, path):
    if name not in objects:
        raise BadReference(f"{path}: no object named {name!r}", details=[{"path": path, "name": name}])
    if objects[name].get("type") not in allowed:
        raise BadReference(f"{path}: {name!r} is a {objects[name].get('type')}, expected one of {sorted(allowed)}",
                           details=[{"path": path, "name": name}])


def _check_ranges(p, path):
    def num(key, lo, hi):
        if key in p:
            v = p[key]
            _expect(isinstance(v, (int, float)) and not isinstance(v, bool) and lo < v <= hi,
                    f"{key} must lie in ({lo}, {hi}]", f"{path}.{key}")

    num("tol", 0, 1)
    num("eps", 0, 0.1)
    if "degree" in p:
        _expect(isinstance(p["degree"], int) and 0 <= p["degree"] <= 6, "degree must be in 0..6", path + ".degree")
    if "samples" in p:
        _expect(isinstance(p["samples"], int) and 8 <= p["samples"] <= 65536, "samples must be in 8..65536",
                path + ".samples")
    if "mode" in p:
        _expect(p["mode"] in ("trivialized", "local"), "mode is trivialized or local", path + ".mode")
    if "check" in p:
        _expect(p["check"] in ("none", "chain_map"), "check is none or chain_map", path + ".check")
    if "expected" in p:
        e = p["expected"]
        _expect(isinstance(e, (int, float)) or (isinstance(e, list) and len(e) == 2),
                "expected is a number or [re, im]", path + ".expected")


# object construction

def _form(m, spec, path):
    if isinstance(spec, str):
        return m.get(spec)
    if isinstance(spec, dict) and "builtin" not in spec:
        return PolyForm.from_json(spec)
    return _builtin_form(spec or {}, path)


def _builtin_form(obj, path):
    name = obj.get("builtin")
    dim = obj.get("dim", 3)
    if name == "r3_curving":
        return r3_curving(dim)
    if name == "vol":
        return vol(dim)
    raise ParseError(f"{path}: unknown builtin form {name!r}", details=[{"path": path}])


def _build(m, name):
    obj = m.objects[name]
    typ = obj["type"]
    path = f"$.objects.{name}"
    if typ == "cover":
        return Cover.from_json(obj)
    if typ == "form":
        if "form" in obj:
            return PolyForm.from_json(obj["form"])
        return _builtin_form(obj, path)
    if typ == "vector_field":
        return VectorField.from_json(obj)
    if typ == "gerbe":
        cover = m.get(obj["cover"]) if "cover" in obj else None
        if "trivial" in obj:
            return trivial_gerbe(_form(m, obj["trivial"], path + ".trivial"), cover)
        if cover is None:
            raise ParseError(f"{path}: gerbe data need a cover", details=[{"path": path}])
        return gerbe_from_json(cover, obj)
    if typ == "plectic":
        return make_plectic(_form(m, obj["omega"], path + ".omega"))
    if typ == "loop":
        from .loopspace import SampledLoop
        if "circle" in obj:
            c = obj["circle"]
            return SampledLoop.circle(c.get("N", 256), c.get("radius", 1.0), tuple(c.get("center", (0, 0, 0))),
                                      tuple(c.get("plane", (0, 1))))
        return SampledLoop(np.array(obj["samples"], dtype=float), closed=obj.get("closed", True))
    if typ == "surface":
        from .loopspace import TriangulatedSurface, icosphere, polar_disc
        if "icosphere" in obj:
            c = obj["icosphere"]
            return icosphere(c.get("subdivisions", 4), c.get("radius", 1.0), tuple(c.get("center", (0, 0, 0))))
        if "polar_disc" in obj:
            c = obj["polar_disc"]
            return polar_disc(c.get("n_r", 16), c.get("n_theta", 64), c.get("radius", 1.0),
                              tuple(c.get("center", (0, 0, 0))), tuple(c.get("plane", (0, 1))))
        return TriangulatedSurface.from_json(obj)
    if typ == "functional":
        from .loopspace import LoopFunctional
        if "exp" in obj:
            e = obj["exp"]
            c = Scalar.from_json(e["c"]) if "c" in e else 1
            return LoopFunctional.exp(_form(m, e["theta"], path + ".exp.theta"), c)
        return LoopFunctional.from_json(obj)
    if typ == "morphism":
        from .twovect import _mat_from_json
        src, tgt = m.get(obj["src"]), m.get(obj["tgt"])
        alpha = {tuple(e["simplex"]): _mat_from_json(e["matrix"]) for e in obj["alpha"]}
        a = {e["patch"]: MatForm.from_json(e["form"]) for e in obj["a"]}
        return make_morphism(src, tgt, alpha, a, fake_flat=obj.get("fake_flat", False))
    if typ == "matform":
        return MatForm.from_json(obj)
    if typ == "section":
        return ModelSection([[PolyForm.from_json(f) for f in row] for row in obj["omega"]])
    raise UnknownField(f"{path}: unknown type {typ!r}")


# tasks

class TaskResult:
    def __init__(self, index, command, status, values=None, residuals=None, message=None, label=None):
        self.index = index
        self.command = command
        self.status = status
        self.values = values or {}
        self.residuals = residuals or []
        self.message = message
        self.label = label
        self.seconds = None

    def to_json(self, timings=False):
        out = {"index": self.index, "command": self.command, "status": self.status,
               "values": self.values, "residuals": self.residuals}
        if self.label is not None:
            out["label"] = self.label
        if self.message is not None:
            out["message"] = self.message
        if timings and self.seconds is not None:
            out["timings"] = {"seconds": self.seconds}
        return out


class Report:
    """Ordered task results; ``exit_code`` is 0 (pass), 1 (fail) or 2 (input error)."""

    def __init__(self, results, version=VERSION):
        self.results = results
        self.version = version

    @property
    def exit_code(self):
        if any(r.status == "error" for r in self.results):
            return 2
        if any(r.status == "fail" for r in self.results):
            return 1
        return 0

    @property
    def passed(self):
        return self.exit_code == 0

    def to_json(self, timings=False):
        from . import __version__
        return {"gerbelab": __version__, "manifest_version": self.version,
                "status": "pass" if self.passed else ("error" if self.exit_code == 2 else "fail"),
                "tasks": [r.to_json(timings) for r in self.results]}


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def _expected(p):
    e = p.get("expected")
    if e is None:
        return None
    return complex(e) if not isinstance(e, list) else complex(e[0], e[1])


def _compare(values, value, p, default_tol):
    """Record a relative comparison with ``expected`` if present; returns pass flag."""
    e = _expected(p)
    if e is None:
        return True
    tol = p.get("tol", default_tol)
    err = abs(value - e) / max(abs(e), 1e-300)
    values["expected"] = _cplx(e)
    values["rel_error"] = err
    return err <= tol


def _resample(loop, p):
    N = p.get("samples")
    if N is None or N == loop.N or not loop.closed:
        return loop
    from .loopspace import SampledLoop
    return SampledLoop.from_function(lambda t: loop.at(t), N)


def _curving(m, refs):
    if "curving" in refs:
        return m.get(refs["curving"])
    if "gerbe" in refs:
        L = m.get(refs["gerbe"])
        if len(L.cover.labels) != 1:
            raise InputError("a single-patch gerbe is needed for its curving")
        return L.B[(L.cover.labels[0],)]
    return r3_curving()


def _task_validate(m, refs, p):
    out = {}
    for role in ("gerbe", "morphism", "plectic"):
        if role in refs:
            obj = m.get(refs[role])
            out[role] = refs[role]
            if role == "gerbe":
                out["curvature"] = obj.H.to_json()
            elif role == "morphism":
                out["rank"] = obj.rank
            else:
                out["certificate"] = obj.certificate
    return True, out, []


def _task_curvature(m, refs, p):
    L = m.get(refs["gerbe"])
    H = curvature_3form(L)
    out = {"H": H.to_json()}
    if "plectic" in refs:
        rep = prequantum_check(m.get(refs["plectic"]), L)
        out["prequantum"] = rep.ok
        return rep.ok, out, [] if rep.ok else [{"layer": "prequantum", "difference": rep.difference.to_json()}]
    return True, out, []


def _task_dd(m, refs, p):
    g = dd_cocycle(m.get(refs["gerbe"]))
    return True, {"cocycle": g.to_json(refs["gerbe"])}, []


def _task_hol_line(m, refs, p):
    from .loopspace import line_holonomy
    h = line_holonomy(m.get(refs["form"]), _resample(m.get(refs["loop"]), p))
    out = {"holonomy": _cplx(h)}
    return _compare(out, h, p, 1e-6), out, []


def _task_hol_surface(m, refs, p):
    from .loopspace import surface_holonomy
    S = m.get(refs["surface"])
    mode = p.get("mode", "trivialized")
    data = m.get(refs["gerbe"]) if "gerbe" in refs else _curving(m, refs)
    h = surface_holonomy(data, S, mode)
    out = {"holonomy": _cplx(h), "mode": mode}
    return _compare(out, h, p, 1e-3), out, []


def _task_hol_brane(m, refs, p):
    from .loopspace import dbrane_holonomy
    h = dbrane_holonomy(m.get(refs["curving"]), m.get(refs["connection"]), m.get(refs["disc"]),
                        _resample(m.get(refs["boundary"]), p))
    out = {"holonomy": _cplx(h)}
    return _compare(out, h, p, 1e-3), out, []


def _task_transgress(m, refs, p):
    from .loopspace import d_transgression, transgress_d, transgress_form, boundary_term
    w = m.get(refs["form"])
    loop = _resample(m.get(refs["loop"]), p)
    names = refs.get("fields", [])
    names = names if isinstance(names, list) else [names]
    fields = [m.get(n) for n in names]
    out = {}
    if len(fields) == w.deg - 1:
        X = [loop.pullback_field(V) for V in fields]
        out["value"] = _cplx(transgress_form(w, loop, X))
    if p.get("check", "none") == "chain_map":
        if len(fields) != w.deg:
            raise InputError(f"chain-map check needs {w.deg} fields, got {len(fields)}")
        eps = p.get("eps", 1e-4)
        lhs = d_transgression(w, loop, fields, eps, p.get("richardson", True))
        rhs = transgress_d(w, loop, fields)
        if not loop.closed:
            rhs = rhs + boundary_term(w, loop, fields)
        err = abs(lhs - rhs)
        out.update({"d_transgression": _cplx(lhs), "transgression_of_d": _cplx(rhs), "error": err})
        tol = p.get("tol", 1e-5)
        return err <= tol, out, [] if err <= tol else [{"check": "chain_map", "residual": err}]
    return _compare(out, complex(*out["value"]) if "value" in out else 0j, p, 1e-6), out, []


def _task_homspace(m, refs, p):
    om, et = m.get(refs["source"]), m.get(refs["target"])
    D = p.get("degree", 1)
    basis = hom_space(om, et, D)
    # Gram matrix of the inner product; raises XDependence if tr(f* g) varies
    gram = [[inner_product_hilbert(f, g).to_json() for g in basis] for f in basis]
    out = {"degree": D, "dimension": len(basis), "basis": [f.to_json() for f in basis], "gram": gram}
    e = p.get("expected")
    ok = e is None or int(e) == len(basis)
    return ok, out, [] if ok else [{"check": "dimension", "expected": e, "got": len(basis)}]


def _task_ks(m, refs, p):
    from .loopspace import ks_commutator_residual
    P = m.get(refs["plectic"])
    rho = _curving(m, refs)
    a, b = m.get(refs["alpha"]), m.get(refs["beta"])
    Psi = m.get(refs["functional"])
    loop = _resample(m.get(refs["loop"]), p)
    eps = p.get("eps", 1e-3)
    res, nrm = ks_commutator_residual(P, rho, a, b, Psi, loop, eps, p.get("richardson", True))
    tol = p.get("tol", 1e-3)
    rel = abs(res) / max(nrm, 1e-300)
    out = {"residual": _cplx(res), "psi_abs": nrm, "relative": rel}
    return rel <= tol, out, [] if rel <= tol else [{"check": "commutator", "residual": rel}]


def _task_suite(m, refs, p):
    from .suite import run_suite
    crit = p.get("criteria")
    res = run_suite(p.get("seed"), set(crit) if crit else None)
    ok = all(r.passed for r in res)
    return ok, {"criteria": [r.to_json() for r in res]}, [
        {"criterion": r.cid, "failures": r.failures[:5]} for r in res if not r.passed]


TASKS = {"validate": _task_validate, "curvature": _task_curvature, "dd": _task_dd,
         "hol-line": _task_hol_line, "hol-surface": _task_hol_surface, "hol-brane": _task_hol_brane,
         "transgress": _task_transgress, "homspace": _task_homspace, "ks-check": _task_ks,
         "suite": _task_suite}


def run_task(m, k, task, overrides=None):
    p = dict(task.get("params", {}))
    p.update(overrides or {})
    cmd = task["command"]
    label = p.pop("label", None)
    t0 = time.perf_counter()
    try:
        ok, values, residuals = TASKS[cmd](m, task.get("refs", {}), p)
        res = TaskResult(k, cmd, "pass" if ok else "fail", values, residuals, label=label)
    except CheckFailure as e:
        res = TaskResult(k, cmd, "fail", {}, e.details, f"{type(e).__name__}: {e}", label)
    except InputError as e:
        res = TaskResult(k, cmd, "error", {}, e.details, f"{type(e).__name__}: {e}", label)
    except GerbelabError as e:
        res = TaskResult(k, cmd, "fail", {}, e.details, f"{type(e).__name__}: {e}", label)
    except (ValueError, KeyError, TypeError, IndexError) as e:
        res = TaskResult(k, cmd, "error", {}, [], f"{type(e).__name__}: {e}", label)
    res.seconds = time.perf_counter() - t0
    return res


def run(manifest, overrides=None, commands=None):
    """Execute the tasks in order; a failing task never stops later ones.

    ``overrides`` replace task parameters (CLI flags); ``commands``
    restricts the run to the named commands.
    """
    results = []
    for k, task in enumerate(manifest.tasks):
        if commands and task["command"] not in commands:
            continue
        results.append(run_task(manifest, k, task, overrides))
    return Report(results, manifest.version)


def _summ(v):
    if isinstance(v, float):
        return "%.6g" % v
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, float) for t in v):
        return "%.6g%+.6gi" % tuple(v)
    # exact residuals: a form (dict) or a U(1) exponent polynomial (list of terms)
    try:
        if isinstance(v, dict):
            return str(PolyForm.from_json(v))
        if isinstance(v, list) and v and isinstance(v[0], dict) and "exps" in v[0]:
            return "exp(2 pi i (%s))" % Poly.from_json(len(v[0]["exps"]), v)
    except (KeyError, TypeError, ValueError):
        pass
    return str(v)


def emit_report(report, fmt="json", timings=False):
    """Render a report as canonical JSON or as text."""
    if fmt == "json":
        return canonical.dumps(report.to_json(timings))
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"gerbelab report: {report.to_json()['status'].upper()} ({len(report.results)} tasks)"]
    for r in report.results:
        head = f"[{r.index}] {r.command}"
        if r.label:
            head += f" ({r.label})"
        lines.append(f"{head}: {r.status.upper()}")
        if r.message:
            lines.append(f"    {r.message}")
        for key in sorted(r.values):
            v = r.values[key]
            if isinstance(v, (float, int, bool, str)) or (isinstance(v, list) and len(v) == 2
                                                           and all(isinstance(t, float) for t in v)):
                lines.append(f"    {key} = {_summ(v)}")
        for d in r.residuals[:10]:
            if isinstance(d, dict) and "simplex" in d:
                res = d.get("residual")
                lines.append(f"    simplex {tuple(d['simplex'])}: residual {_summ(res)}")
            elif isinstance(d, dict):
                lines.append("    " + ", ".join(f"{k}={_summ(v)}" for k, v in sorted(d.items())))
        if timings and r.seconds is not None:
            lines.append(f"    time = {r.seconds:.3f} s")
    return "\n".join(lines) + "\n"


def bundled(name):
    """Text of a bundled manifest, e.g. ``"r3-prequantum"``."""
    try:
        return resources.files("gerbelab").joinpath("data", f"{name}.json").read_text()
    except FileNotFoundError:
        raise InputError(f"no bundled manifest named {name!r}") from None


def bundled_names():
    d = resources.files("gerbelab").joinpath("data")
    return sorted(f.name[:-5] for f in d.iterdir() if f.name.endswith(".json"))
