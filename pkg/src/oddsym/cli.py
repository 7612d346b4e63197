"""Command line front end.

    oddsym <subcommand> --manifest <path> [--suite <name>] [--out <path>]
                        [--json]

Exit codes: 0 when all residuals are the zero expression (or the command
only computes values), 1 when a residual check fails, 2 on input errors.
Reports are rendered deterministically so golden files stay stable.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bv import delta0, delta_sharp, delta_vol
from .darboux import darboux_pipeline
from .flows import exp_flow, hamiltonian_from_adjusted
from .forms import (one_form_shift, render_form, star, tau_sharp,
                    tau_sharp_inverse)
from .grammar import ParseError, render_expr
from .manifests import Manifest, ManifestError, load_manifest, parse_time
from .scalars import ScalarError
from .superexpr import ParityError
from .surfaces import densities_P, dual_density, pullback_K
from .symplectic import CanonicityError, is_canonical, map_berezinian
from .verify import SUITES, run_suite

_INPUT_ERRORS = (ManifestError, ParseError, ParityError, ScalarError,
                 CanonicityError, ValueError, KeyError)


def _named(manifest, pool_name, key):
    pool = getattr(manifest, pool_name)
    if key not in pool:
        raise ManifestError(f"unknown {pool_name[:-1]} {key!r}")
    return pool[key]


def _structure_arg(manifest, chart, entry):
    name = entry.get("structure", "canonical")
    if name == "canonical":
        return None
    return _named(manifest, "structures", name)


def cmd_bracket(manifest, args):
    entry = manifest.section("bracket")
    chart = manifest.chart(entry["chart"])
    f = manifest.parse(chart, entry["f"])
    g = manifest.parse(chart, entry["g"])
    omega = _structure_arg(manifest, chart, entry)
    from .symplectic import bracket as _bracket
    out = _bracket(f, g, chart, omega)
    return [("bracket", render_expr(out))], None


def cmd_delta0(manifest, args):
    entry = manifest.section("delta0")
    chart = manifest.chart(entry["chart"])
    f = manifest.parse(chart, entry["f"])
    return [("delta0", render_expr(delta0(f, chart)))], None


def cmd_delta_vol(manifest, args):
    entry = manifest.section("delta_vol")
    dv = _named(manifest, "volume_forms", entry["volume"])
    f = manifest.parse(dv.chart, entry["f"])
    return [("delta_vol", render_expr(delta_vol(f, dv)))], None


def cmd_delta_sharp(manifest, args):
    entry = manifest.section("delta_sharp")
    s = _named(manifest, "semidensities", entry["semidensity"])
    out = delta_sharp(s)
    return [("delta_sharp", render_expr(out.coefficient))], None


def cmd_berezinian(manifest, args):
    entry = manifest.section("berezinian")
    fmap = _named(manifest, "maps", entry["map"])
    return [("berezinian", render_expr(map_berezinian(fmap)))], None


def cmd_darboux(manifest, args):
    entry = manifest.section("darboux")
    omega = _named(manifest, "structures", entry["structure"])
    result = darboux_pipeline(omega, omega.chart)
    lines = []
    for index, (kind, fmap) in enumerate(result.steps):
        for name, target in zip(omega.chart.coordinate_names, fmap.targets):
            lines.append((f"step{index}[{kind}].{name}",
                          render_expr(target)))
    for name, target in zip(omega.chart.coordinate_names,
                            result.composite.targets):
        lines.append((f"composite.{name}", render_expr(target)))
    bad = result.report.nonzero()
    for key in sorted(bad):
        lines.append((f"residual{key}", render_expr(bad[key])))
    lines.append(("residuals", "all zero" if result.ok else "NONZERO"))
    return lines, result.ok


def cmd_flow(manifest, args):
    entry = manifest.section("flow")
    chart = manifest.chart(entry["chart"])
    q = manifest.parse(chart, entry["Q"])
    t_value = parse_time(entry.get("t", 1))
    fmap = exp_flow(q, chart, t_value)
    lines = [(name, render_expr(target)) for name, target in
             zip(chart.coordinate_names, fmap.targets)]
    ok, report = is_canonical(fmap)
    bad = report.nonzero()
    for key in sorted(bad):
        lines.append((f"residual{key}", render_expr(bad[key])))
    lines.append(("canonical", "yes" if ok else "NO"))
    return lines, ok


def cmd_hamiltonian_from_map(manifest, args):
    entry = manifest.section("hamiltonian_from_map")
    fmap = _named(manifest, "maps", entry["map"])
    q = hamiltonian_from_adjusted(fmap)
    roundtrip = exp_flow(q, fmap.source, 1)
    ok = list(roundtrip.targets) == list(fmap.targets)
    return [("generator", render_expr(q)),
            ("round_trip", "exact" if ok else "MISMATCH")], ok


def cmd_tau_sharp(manifest, args):
    entry = manifest.section("tau_sharp")
    w = _named(manifest, "forms", entry["form"])
    s = tau_sharp(w)
    return [("coefficient", render_expr(s.coefficient))], None


def cmd_tau_sharp_inv(manifest, args):
    entry = manifest.section("tau_sharp_inv")
    s = _named(manifest, "semidensities", entry["semidensity"])
    w = tau_sharp_inverse(s)
    return [("form", render_form(w))], None


def cmd_shift(manifest, args):
    entry = manifest.section("shift")
    a = _named(manifest, "forms", entry["form"])
    s = _named(manifest, "semidensities", entry["semidensity"])
    out = one_form_shift(a, s)
    return [("coefficient", render_expr(out.coefficient))], None


def cmd_star(manifest, args):
    entry = manifest.section("star")
    w1 = _named(manifest, "forms", entry["w1"])
    w2 = _named(manifest, "forms", entry["w2"])
    return [("form", render_form(star(w1, w2)))], None


def cmd_pullback_surface(manifest, args):
    entry = manifest.section("pullback_surface")
    s = _named(manifest, "semidensities", entry["semidensity"])
    surface = _named(manifest, "surfaces", entry["surface"])
    out = pullback_K(s, surface)
    return [("coefficient", render_expr(out.coefficient))], None


def cmd_dual_density(manifest, args):
    entry = manifest.section("dual_density")
    dv = _named(manifest, "volume_forms", entry["volume"])
    surface = _named(manifest, "surfaces", entry["surface"])
    f = manifest.parse(dv.chart, entry["f"])
    phi = manifest.parse(dv.chart, entry["phi"])
    out = dual_density(f, phi, dv, surface)
    return [("coefficient", render_expr(out.coefficient))], None


def cmd_densities_p(manifest, args):
    entry = manifest.section("densities_p")
    dv = _named(manifest, "volume_forms", entry["volume"])
    surface = _named(manifest, "surfaces", entry["surface"])
    p0, p1 = densities_P(dv, surface)
    return [("P0", render_expr(p0)), ("P1", render_expr(p1))], None


def cmd_verify(manifest, args):
    names = [args.suite] if args.suite else sorted(SUITES)
    lines = []
    all_ok = True
    for name in names:
        checks = run_suite(name)
        for check in checks:
            status = "ok" if check.ok else "FAIL"
            text = status if not check.detail else f"{status} {check.detail}"
            lines.append((f"{name}.{check.label}", text))
            all_ok = all_ok and check.ok
    lines.append(("verify", "pass" if all_ok else "fail"))
    return lines, all_ok


COMMANDS = {
    "bracket": (cmd_bracket, True),
    "delta0": (cmd_delta0, True),
    "delta-vol": (cmd_delta_vol, True),
    "delta-sharp": (cmd_delta_sharp, True),
    "berezinian": (cmd_berezinian, True),
    "darboux": (cmd_darboux, True),
    "flow": (cmd_flow, True),
    "hamiltonian-from-map": (cmd_hamiltonian_from_map, True),
    "tau-sharp": (cmd_tau_sharp, True),
    "tau-sharp-inv": (cmd_tau_sharp_inv, True),
    "shift": (cmd_shift, True),
    "star": (cmd_star, True),
    "pullback-surface": (cmd_pullback_surface, True),
    "dual-density": (cmd_dual_density, True),
    "densities-p": (cmd_densities_p, True),
    "verify": (cmd_verify, False),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oddsym",
        description="exact calculus on odd symplectic superspace")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, needs_manifest) in COMMANDS.items():
        cmd = sub.add_parser(name)
        cmd.add_argument("--manifest", required=needs_manifest,
                         help="path to the JSON manifest")
        cmd.add_argument("--suite", default=None,
                         choices=sorted(SUITES) if name == "verify" else None,
                         help="verification suite name"
                         if name == "verify" else argparse.SUPPRESS)
        cmd.add_argument("--out", default=None,
                         help="write the report to this file")
        cmd.add_argument("--json", action="store_true",
                         help="emit a machine-readable report")
    return parser


def _render_report(command, lines, ok, as_json):
    if as_json:
        payload = {
            "command": command,
            "results": [{"label": label, "value": value}
                        for label, value in lines],
            "ok": ok,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    text = [f"{label}: {value}" for label, value in lines]
    return "\n".join(text) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler, needs_manifest = COMMANDS[args.command]
    try:
        manifest = load_manifest(args.manifest) if args.manifest \
            else Manifest({})
        lines, ok = handler(manifest, args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = _render_report(args.command, lines, ok, args.json)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(report)
    else:
        sys.stdout.write(report)
    return 0 if ok is None or ok else 1


if __name__ == "__main__":
    sys.exit(main())
