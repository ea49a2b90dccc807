"""Command-line front end.

    loadshed simulate INSTANCE [--control none|proportional:L|file:PATH] [--horizon T]
    loadshed solve INSTANCE --n N [--method exact|tree-constant|one-shot|proj:ETA]
    loadshed table1 [--n-max 5] [--out CSV]
    loadshed instances [--export DIR]

INSTANCE is a bundled name (see `loadshed instances`) or a file in the format
documented in loadshed.io.  All commands print CSV; --figures DIR additionally
renders matplotlib figures next to the delimited output.  Exit codes: 0 ok,
2 parse error, 3 solver infeasibility.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import instances as _instances
from .aggregation import value_iteration, retrieve_control, RetrievalFailed
from .cascade import NetworkState, failure_step, is_feasible
from .io import ParseError, emit_instance, load_instance
from .projection import eta_family, projected_search
from .tree_solver import NotTreeReducible, solve_one_shot, solve_tree_constant

EXIT_PARSE = 2
EXIT_SOLVER = 3


def _fmt(x, full=False):
    if full:
        return repr(float(x))
    return f"{float(x):.6g}"


def _parse_control(arg):
    if arg == "none":
        return ("none", None)
    if arg.startswith("proportional:"):
        lam = float(arg.split(":", 1)[1])
        if not 0.0 <= lam <= 1.0:
            raise ValueError("proportional factor must be in [0, 1]")
        return ("proportional", lam)
    if arg.startswith("file:"):
        return ("file", arg.split(":", 1)[1])
    raise ValueError(f"unknown control mode {arg!r}")


def _controls_from_file(net, path):
    """Stage-indexed controls from CSV lines `stage,node,value`."""
    stages = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") or line.lower().startswith("stage"):
                continue
            t, node, val = line.split(",")
            stages.setdefault(int(t), {})[node.strip()] = float(val)
    out = []
    for t in sorted(stages):
        out.append(net.p_vector(stages[t]))
    return out


def cmd_simulate(args, out):
    from .cascade import _rebalanced

    net, state = load_instance(args.instance)
    mode, param = _parse_control(args.control)
    file_controls = _controls_from_file(net, param) if mode == "file" else None
    out.write("t,active,failed,residual\n")
    rows = []
    st = state
    failed = sorted(net.all_links() - st.active)  # pre-existing outages
    for t in range(args.horizon + 1):
        residual = float(net.s @ st.p_array())
        rows.append((t, len(st.active), ";".join(failed), residual))
        out.write(
            f"{t},{len(st.active)},{';'.join(failed)},{_fmt(residual, args.full_precision)}\n"
        )
        if t == args.horizon:
            break
        if mode == "proportional":
            u = param * st.p_array()
        elif mode == "file":
            u = file_controls[t] if t < len(file_controls) else file_controls[-1]
        else:
            u = st.p_array()
        # drop components whose injections cannot be balanced
        u = _rebalanced(net, NetworkState.make(net, st.active, u))
        nxt = failure_step(net, st, u)
        failed = sorted(st.active - nxt.active)
        stalled = nxt.active == st.active and np.allclose(nxt.p, st.p)
        st = nxt
        if stalled and is_feasible(net, st):
            break
    if args.figures:
        from . import plots

        plots.ensure_dir(args.figures)
        plots.save_trajectory_figure(
            rows, os.path.join(args.figures, "trajectory.png")
        )
    return 0


def cmd_solve(args, out):
    net, state = load_instance(args.instance)
    N = args.n
    method = args.method
    if method == "exact":
        res = value_iteration(net, state, N)
        value = res.value
        try:
            controls = retrieve_control(net, res, args.epsilon, state=state)
        except RetrievalFailed:
            controls = None
    elif method == "tree-constant":
        sol = solve_tree_constant(net, state, N, root=args.root)
        value = sol.value
        u = net.p_vector(sol.control)
        controls = [u] * N
    elif method == "one-shot":
        value, t_star, ctl, _ = solve_one_shot(net, state, N, root=args.root)
        u = net.p_vector(ctl)
        controls = [state.p_array()] * t_star + [u] * (N - t_star)
    elif method.startswith("proj:"):
        eta = float(method.split(":", 1)[1])
        res = projected_search(net, state, N, eta_family(net, eta))
        value = res.value
        controls = None
    else:
        raise ValueError(f"unknown method {args.method!r}")
    out.write("J\n")
    out.write(_fmt(value, args.full_precision) + "\n")
    if controls is not None:
        out.write("stage,node,value\n")
        for t, u in enumerate(controls):
            for n in net.nodes:
                v = u[net.node_index[n]]
                if abs(v) > 1e-12:
                    out.write(f"{t},{n},{_fmt(v, args.full_precision)}\n")
    if args.figures:
        from . import plots

        plots.ensure_dir(args.figures)
        if method == "exact":
            plots.save_value_figure(
                res.per_depth, os.path.join(args.figures, "residual_vs_horizon.png")
            )
    return 0


ETAS = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def table1_matrix(n_max=5):
    """(etas, horizons, cells, optimal) of the benchmark residual-load table."""
    net, state = _instances.get("ieee39")
    opt = value_iteration(net, state, n_max).per_depth
    cols = {}
    for eta in ETAS:
        cols[eta] = projected_search(net, state, n_max, eta_family(net, eta)).per_depth
    horizons = list(range(1, n_max + 1))
    cells = [[cols[eta][n] for eta in ETAS] for n in horizons]
    optimal = [opt[n] for n in horizons]
    return ETAS, horizons, cells, optimal


def cmd_table1(args, out):
    etas, horizons, cells, optimal = table1_matrix(args.n_max)
    out.write("N," + ",".join(f"eta={e:g}" for e in etas) + ",optimal\n")
    for i, n in enumerate(horizons):
        row = ",".join(_fmt(v, args.full_precision) for v in cells[i])
        out.write(f"{n},{row},{_fmt(optimal[i], args.full_precision)}\n")
    if args.figures:
        from . import plots

        plots.ensure_dir(args.figures)
        plots.save_table_figure(
            etas, horizons, cells, optimal, os.path.join(args.figures, "residual_table.png")
        )
    return 0


def cmd_instances(args, out):
    for name in sorted(_instances.BUILTIN):
        out.write(name + "\n")
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for name in sorted(_instances.BUILTIN):
            net, state = _instances.get(name)
            with open(os.path.join(args.export, f"{name}.net"), "w") as fh:
                fh.write(emit_instance(net, state))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="loadshed", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the cascade dynamics")
    sim.add_argument("instance")
    sim.add_argument("--control", default="none",
                     help="none | proportional:LAMBDA | file:PATH")
    sim.add_argument("--horizon", type=int, default=50)
    sim.add_argument("--full-precision", action="store_true")
    sim.add_argument("--figures", default=None, help="directory for figure output")
    sim.set_defaults(func=cmd_simulate)

    sol = sub.add_parser("solve", help="optimal load shedding")
    sol.add_argument("instance")
    sol.add_argument("--n", type=int, required=True, help="control horizon")
    sol.add_argument("--method", default="exact",
                     help="exact | tree-constant | one-shot | proj:ETA")
    sol.add_argument("--epsilon", type=float, default=1e-6,
                     help="retrieval gap for the exact method")
    sol.add_argument("--root", default=None, help="root junction for tree methods")
    sol.add_argument("--full-precision", action="store_true")
    sol.add_argument("--figures", default=None)
    sol.set_defaults(func=cmd_solve)

    tab = sub.add_parser("table1", help="benchmark residual-load table")
    tab.add_argument("--n-max", type=int, default=5)
    tab.add_argument("--out", default=None, help="CSV path (default: stdout)")
    tab.add_argument("--full-precision", action="store_true")
    tab.add_argument("--figures", default=None)
    tab.set_defaults(func=cmd_table1)

    ins = sub.add_parser("instances", help="list / export bundled instances")
    ins.add_argument("--export", default=None, help="write .net files here")
    ins.set_defaults(func=cmd_instances)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = sys.stdout
    close = False
    if getattr(args, "out", None):
        out = open(args.out, "w")
        close = True
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotTreeReducible, RetrievalFailed) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    finally:
        if close:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
