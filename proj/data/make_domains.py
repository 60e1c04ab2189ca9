"""Writes the zoo domain files. The H^1 log-log aperture follows the fitted b0."""
import json
import pathlib

here = pathlib.Path(__file__).parent
bounds = json.loads((here / "bounds_heisenberg.json").read_text())
c_star = bounds["Q"] / ((bounds["Q"] + 4.0) * bounds["b0"])


def box(model):
    if model == "heisenberg":
        return {"half_width": [2.0, 2.0, 4.0], "depth": 2.0, "above": 1.0}
    return {"half_width": [2.0], "depth": 2.0, "above": 1.0}


def domain(model, variant, params):
    n = 3 if model == "heisenberg" else 1
    return {"schema": 1, "model": model, "variant": variant, "params": params,
            "z0": {"x": [0.0] * n, "t": 0.0}, "box": box(model)}


fixtures = {
    "punctured_slab_e1": domain("euclidean1", "PuncturedSlab", {}),
    "half_space_e1": domain("euclidean1", "HalfSpaceComplement", {}),
    "cone_e1": domain("euclidean1", "ParabolicConeExterior", {"M": 1.0, "r0": 1.0}),
    "cone_h1": domain("heisenberg", "ParabolicConeExterior", {"M": 1.0, "r0": 1.0}),
    "loglog_h1_halfCstar": domain("heisenberg", "LogLogParaboloidExteriorCondition",
                                  {"C": 0.5 * c_star, "r0": 1.0}),
    "loglog_h1_gap": domain("heisenberg", "LogLogParaboloidExteriorCondition",
                            {"C": 0.5 * (c_star + 1.0 / bounds["b0"]), "r0": 1.0}),
    "loglog_interior_e1_C8": domain("euclidean1", "LogLogParaboloidInterior", {"C": 8.0, "r0": 1.0}),
}

out = here / "domains"
out.mkdir(exist_ok=True)
for name, d in fixtures.items():
    (out / f"{name}.json").write_text(json.dumps(d, indent=2) + "\n")
