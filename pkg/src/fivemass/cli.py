"""Command-line front end.

Commands: solve a single pose, play (render) a motion to a joint CSV,
check a rendered trajectory against the point-mass oracle, and bench the
pose generator over the three reachability scenarios.

Exit codes: 0 success, 1 validation error, 2 infeasible input, 3 I/O
error.
"""

import argparse
import csv
import json
import math
import statistics
import sys
import time

from . import geom, model, motion as motion_mod, oracle, posegen, reduction
from .feasibility import FootFrames, InfeasibleError
from .fixtures import fixture_path
from .model import SpecError
from .posegen import ConstraintSet


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# document parsing

def parse_rotation(obj):
    """Rotation from a document node.

    Accepts {"quat": [w,x,y,z]}, {"tilt_axis": [..], "tilt_angle": a,
    "yaw": y}, {"z_axis": [..], "yaw": y} or null/missing for identity.
    """
    if obj is None:
        return geom.IDENTITY
    if "quat" in obj:
        return geom.matrix_from_quat(tuple(float(v) for v in obj["quat"]))
    if "z_axis" in obj:
        z = geom.unit(tuple(float(v) for v in obj["z_axis"]))
        return geom.rotation_from_z_and_yaw(z, float(obj.get("yaw", 0.0)))
    if "tilt_axis" in obj:
        axis = geom.unit(tuple(float(v) for v in obj["tilt_axis"]))
        rot = geom.rodrigues(axis, float(obj["tilt_angle"]))
        yaw = float(obj.get("yaw", 0.0))
        return geom.mat_mul(rot, geom.rot_z(yaw)) if yaw else rot
    raise ConfigError("rotation needs quat, z_axis or tilt_axis fields")


def _vec(value, label):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError("%s must be a 3-vector" % label)
    return tuple(float(v) for v in value)


def parse_constraints(doc):
    try:
        feet = doc["feet"]
        left, right = feet["left"], feet["right"]
        frames = FootFrames(
            f_l=_vec(left["pos"], "feet.left.pos"),
            f_r=_vec(right["pos"], "feet.right.pos"),
            r_fl=parse_rotation(left.get("rot")),
            r_fr=parse_rotation(right.get("rot")))
        return ConstraintSet(
            com=_vec(doc["com"], "com"),
            feet=frames,
            r_i=parse_rotation(doc.get("R_I")),
            i_z=float(doc["I_z"]),
            i_psi=float(doc.get("I_psi", 0.0)),
            psi_i=float(doc["psi_I"]) if "psi_I" in doc else None,
            trunk_tilt=(_vec(doc["trunk_tilt"], "trunk_tilt")
                        if "trunk_tilt" in doc else None))
    except KeyError as exc:
        raise ConfigError("constraints missing field %s" % exc) from exc


def parse_motion(doc):
    try:
        keyframes = tuple(
            motion_mod.Keyframe(t=float(entry["t"]),
                                constraints=parse_constraints(entry))
            for entry in doc["keyframes"])
        return motion_mod.Motion(name=doc.get("name", "motion"),
                                 keyframes=keyframes,
                                 interpolation=doc.get("interpolation",
                                                       "cubic"))
    except KeyError as exc:
        raise ConfigError("motion missing field %s" % exc) from exc


def load_json_file(path):
    with open(path, "r") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# serialisation

def pose_to_dict(solution):
    report = solution.report
    out = {
        "status": report.status,
        "report": {
            "iterations": report.iterations,
            "residual": report.residual,
            "flags": list(report.flags),
            "solve_time_us": report.solve_time_us,
            "adjusted_i_z": report.adjusted_i_z,
            "adjusted_r_i": (None if report.adjusted_r_i is None
                             else [list(row) for row in report.adjusted_r_i]),
            "diagnostics": report.diagnostics,
        },
        "joints": dict(zip(posegen.JOINT_NAMES, solution.joint_vector)),
        "joint_vector": list(solution.joint_vector),
    }
    if solution.base is not None:
        out["base"] = {"h_m": list(solution.base.h_m),
                       "r_b": [list(row) for row in solution.base.r_b],
                       "psi_t": solution.base.psi_t}
    if solution.layout is not None:
        lay = solution.layout
        out["layout"] = {name: list(getattr(lay, name))
                         for name in ("m_t", "m_ll", "m_rl", "m_la", "m_ra",
                                      "h_m", "lower", "upper")}
    return out


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_solve(args):
    spec = model.load_robot_spec(load_json_file(args.robot))
    constraints = parse_constraints(load_json_file(args.constraints))
    solution = posegen.generate_pose(spec, constraints)
    _write_text(args.out, json.dumps(pose_to_dict(solution), indent=2) + "\n")
    return 2 if solution.report.status == posegen.STATUS_INFEASIBLE else 0


def cmd_play(args):
    spec = model.load_robot_spec(load_json_file(args.robot))
    motion = parse_motion(load_json_file(args.motion))
    trajectory = motion_mod.render_trajectory(motion, args.rate, spec)
    rows = ["t," + ",".join("q%d" % (i + 1) for i in range(20)) + ",status"]
    for frame in trajectory.frames:
        rows.append("%.6f,%s,%s" % (
            frame.t, ",".join("%.9f" % q for q in frame.joints),
            frame.status))
    _write_text(args.out, "\n".join(rows) + "\n")
    if trajectory.error_count:
        print("warning: %d infeasible frame(s)" % trajectory.error_count,
              file=sys.stderr)
    return 0


def read_trajectory_csv(path):
    frames = []
    with open(path, "r", newline="") as fh:
        for row in csv.DictReader(fh):
            joints = tuple(float(row["q%d" % (i + 1)]) for i in range(20))
            frames.append((float(row["t"]), joints, row["status"]))
    return frames


def cmd_check(args):
    spec = model.load_robot_spec(load_json_file(args.robot))
    motion = parse_motion(load_json_file(args.constraints_from))
    frames = read_trajectory_csv(args.trajectory)
    lines = ["t,com_err,Ixx_err,Iyy_err,Izz_err,orient_err"]
    worst = 0.0
    for t, joints, _status in frames:
        constraints = motion_mod.sample_motion(motion, t)
        solution = posegen.generate_pose(spec, constraints)
        if solution.base is None:
            lines.append("%.6f,nan,nan,nan,nan,nan" % t)
            continue
        layout = oracle.forward_layout(spec, joints, solution.base)
        achieved = oracle.inertia_report(layout, spec)
        requested = oracle.requested_from_constraints(constraints)
        report = oracle.compare(requested, achieved)
        by_axis = _axis_order_errors(requested.components,
                                     report.moment_errors)
        worst = max(worst, report.com_error)
        lines.append("%.6f,%.9f,%.9f,%.9f,%.9f,%.9f" % (
            t, report.com_error, by_axis[0], by_axis[1], by_axis[2],
            report.orientation_error))
    _write_text(args.out, "\n".join(lines) + "\n")
    print("max com_err: %.6f m over %d frames" % (worst, len(frames)),
          file=sys.stderr)
    return 0


def _axis_order_errors(components, sorted_errors):
    """Map sorted-pairing moment errors back to the xx, yy, zz axes."""
    moments = components.moments
    order = sorted(range(3), key=lambda k: -moments[k])
    by_axis = [0.0, 0.0, 0.0]
    for slot, axis in enumerate(order):
        by_axis[axis] = sorted_errors[slot]
    return by_axis


def default_bench_scenarios(spec):
    """Probe the robot for one request per reachability outcome.

    The paper-style scenarios are defined by which constraints survive,
    so the concrete numbers are found by classifying a grid of standing
    requests against this robot.
    """
    half_w = 0.5 * spec.hip_width
    ankle_z = spec.legs[0].end_offset[2]
    feet = FootFrames(f_l=(0.0, half_w, 0.0), f_r=(0.0, -half_w, 0.0),
                      r_fl=geom.IDENTITY, r_fr=geom.IDENTITY)
    leg_len = spec.legs[0].c + spec.legs[0].a
    found = {}
    tilt35 = geom.rodrigues((0.0, 1.0, 0.0), math.radians(35.0))
    for com_f in (0.72, 0.8, 0.88):
        com = (0.0, 0.0, ankle_z + com_f * leg_len + 0.25 * leg_len)
        for i_z_f in (0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0):
            i_z = i_z_f * 0.1 * spec.total_mass * leg_len * leg_len
            for r_i, tag in ((geom.IDENTITY, "flat"), (tilt35, "tilt")):
                cs = ConstraintSet(com=com, feet=feet, r_i=r_i, i_z=i_z,
                                   i_psi=0.005)
                status = posegen.generate_pose(spec, cs).report.status
                if status not in found:
                    found[status] = cs
        if len(found) >= 3:
            break
    try:
        return (found[posegen.STATUS_EXACT],
                found[posegen.STATUS_INERTIA_ADJUSTED],
                found[posegen.STATUS_COM_ONLY])
    except KeyError as exc:
        raise ConfigError("could not find a %s scenario for this robot; "
                          "pass --scenarios explicitly" % exc) from exc


def run_bench(spec, scenarios, n, warmup=200, batches=0):
    """Wall-clock statistics over solitary generate_pose calls.

    The timer brackets only the solver; scenario statuses are asserted
    before anything is timed.
    """
    wanted = (posegen.STATUS_EXACT, posegen.STATUS_INERTIA_ADJUSTED,
              posegen.STATUS_COM_ONLY)
    labels = ("CoM + R_I + I_z", "CoM + R_I", "CoM")
    for cs, status in zip(scenarios, wanted):
        got = posegen.generate_pose(spec, cs).report.status
        if got != status:
            raise ConfigError("scenario expected status %r but solved as %r"
                              % (status, got))
    results = []
    for label, cs in zip(labels, scenarios):
        for _ in range(warmup):
            posegen.generate_pose(spec, cs)
        samples = []
        perf = time.perf_counter_ns
        for _ in range(n):
            t0 = perf()
            posegen.generate_pose(spec, cs)
            samples.append((perf() - t0) / 1000.0)
        mean = statistics.fmean(samples)
        if batches and batches > 1:
            size = max(1, len(samples) // batches)
            means = [statistics.fmean(samples[i:i + size])
                     for i in range(0, size * batches, size)]
            mean = statistics.median(means)
        results.append({"label": label, "mean_us": mean,
                        "std_us": statistics.pstdev(samples),
                        "n": len(samples)})
    return results


def cmd_bench(args):
    spec = model.load_robot_spec(load_json_file(args.robot))
    if args.scenarios:
        if len(args.scenarios) != 3:
            raise ConfigError("--scenarios takes exactly three files "
                              "(exact, inertia-adjusted, CoM-only)")
        scenarios = tuple(parse_constraints(load_json_file(p))
                          for p in args.scenarios)
    else:
        scenarios = default_bench_scenarios(spec)
    results = run_bench(spec, scenarios, args.n, warmup=args.warmup,
                        batches=args.batches)
    print("%-18s %12s %12s %8s" % ("constraints met", "mean (us)",
                                   "sd (us)", "n"))
    for row in results:
        print("%-18s %12.4f %12.4f %8d" % (row["label"], row["mean_us"],
                                           row["std_us"], row["n"]))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fivemass",
        description="Whole-body humanoid poses from foot, CoM and "
                    "CRB-inertia targets (five-mass model).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a single pose")
    p.add_argument("--robot", required=True)
    p.add_argument("--constraints", required=True)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("play", help="render a motion to a joint CSV")
    p.add_argument("--robot", required=True)
    p.add_argument("--motion", required=True)
    p.add_argument("--rate", type=float, default=100.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("check", help="oracle deviations of a trajectory")
    p.add_argument("--robot", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--constraints-from", required=True, dest="constraints_from")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="time the pose generator")
    p.add_argument("--robot", default=fixture_path("igus_like.json"))
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--warmup", type=int, default=200)
    p.add_argument("--batches", type=int, default=0,
                   help="report the median of this many batch means")
    p.add_argument("--scenarios", nargs="*", default=None,
                   help="three constraint files: exact, inertia-adjusted, "
                        "CoM-only")
    p.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print("infeasible: %s" % exc, file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
