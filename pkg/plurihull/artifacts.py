import csv
import json
import math
from os import makedirs, path
from typing import Iterable, Sequence

from .extend import QuotientModel
from .extremal import HullSlice
from .hull import PoleOrderFit
from .modconst import ModuleVerdict
from .optimize import Status


EXTREMAL_HEADER = ("re_z", "im_z", "re_w", "im_w", "degree", "lb", "ub", "status")
MODULE_HEADER = ("re_z", "im_z", "re_lambda", "im_lambda", "degree", "lb", "ub", "verdict")
MODEL_HEADER = ("which", "index", "re", "im")
POLE_HEADER = ("re", "im", "multiplicity")
SLICE_HEADER = ("re_w", "im_w", "value", "status")
FIT_HEADER = ("r", "mean_value")
CORPUS_HEADER = ("check", "passed", "detail")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def _target(output_dir: str, file_name: str) -> str:
    makedirs(output_dir, exist_ok=True)
    return path.join(output_dir, file_name)


def write_csv(output_dir: str, file_name: str, header: Sequence[str], rows: Iterable) -> str:
    """Write rows under a fixed header with LF endings and round-trip float text."""
    target = _target(output_dir, file_name)
    with open(target, "w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return target


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return _cell(value)
    if isinstance(value, complex):
        return [_json_safe(value.real), _json_safe(value.imag)]
    if isinstance(value, dict):
        return {str(key): _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def write_json(output_dir: str, file_name: str, data: dict) -> str:
    target = _target(output_dir, file_name)
    with open(target, "w", encoding="utf-8", newline="\n") as stream:
        json.dump(_json_safe(data), stream, sort_keys=True, indent=2)
        stream.write("\n")
    return target


def node_status(estimate) -> str:
    if estimate is None:
        return "error"
    statuses = set(estimate.curve.statuses.values())
    for status in (Status.UNBOUNDED, Status.INFEASIBLE_NUMERICS):
        if status in statuses:
            return str(status)
    return str(Status.BOUNDED)


def extremal_rows(sweep: HullSlice):
    for node, estimate in zip(sweep.nodes, sweep.estimates):
        coords = [complex(c) for c in (node if isinstance(node, (tuple, list)) else (node,))]
        z = coords[0]
        w = (coords[1].real, coords[1].imag) if len(coords) > 1 else (None, None)
        if estimate is None:
            yield (z.real, z.imag, *w, None, None, None, "error")
            continue
        for degree in estimate.curve.degrees:
            lb, ub = estimate.curve.entries[degree]
            yield (z.real, z.imag, *w, degree, lb, ub, estimate.curve.statuses[degree])


def module_rows(verdicts: Sequence[ModuleVerdict]):
    for verdict in verdicts:
        for degree in verdict.curve.degrees:
            lb, ub = verdict.curve.entries[degree]
            yield (
                verdict.z.real,
                verdict.z.imag,
                verdict.lam.real,
                verdict.lam.imag,
                degree,
                lb,
                ub,
                verdict.verdict,
            )


def model_rows(model: QuotientModel):
    for index, value in enumerate(model.k_coeffs):
        yield ("k", index, float(value.real), float(value.imag))
    for index, value in enumerate(model.l_coeffs):
        yield ("l", index, float(value.real), float(value.imag))
    yield ("residual", model.residual)


def pole_rows(poles: Sequence[tuple[complex, int]]):
    for location, multiplicity in poles:
        yield (location.real, location.imag, multiplicity)


def slice_rows(sweep: HullSlice):
    for node, estimate in zip(sweep.nodes, sweep.estimates):
        w = complex(node[1])
        value = math.nan if estimate is None else estimate.value
        yield (w.real, w.imag, value, node_status(estimate))


def fit_rows(fit: PoleOrderFit):
    return zip(fit.radii, fit.circle_means)


def fit_summary(fit: PoleOrderFit, extend_multiplicity: int | None = None) -> dict:
    return {
        "m_hat": fit.m_hat,
        "intercept": fit.intercept,
        "order": fit.order,
        "laplacian_residual": fit.max_laplacian_residual,
        "extend_multiplicity": extend_multiplicity,
    }
