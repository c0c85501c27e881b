"""Experiment runner: plain key=value config files, single runs, the
middle-channel sweep, the decoder-oracle check, and chart rendering."""

import argparse
import csv
import os
import random
import sys
from dataclasses import replace

from .core import NetworkConfig, validate_config, KIND_NAMES
from .engine import (PROTOCOLS, benchmark_config, bottleneck_arrival_rate,
                     iter_sweep, run)
from .metrics import summarize
from .source import BSP_IDLE, NNF_IDLE

ACTION_NAMES = dict(KIND_NAMES)
ACTION_NAMES[0] = "PRE_OP"
ACTION_NAMES[BSP_IDLE] = "BSP_IDLE"
ACTION_NAMES[NNF_IDLE] = "NNF_IDLE"

_INT_FIELDS = ("node_count", "horizon", "max_window", "delivery_window", "seed")
_FLOAT_FIELDS = ("arrival_rate", "alpha", "threshold")


def parse_spec(path) -> dict:
    """Flat key=value lines; '#' starts a comment; values stay strings."""
    out = {}
    with open(path) as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed line in {path}: {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _parse_value(field, text):
    if field in _INT_FIELDS:
        return int(text)
    if field in _FLOAT_FIELDS:
        return float(text)
    if field == "erasure_rates":
        return tuple(float(x) for x in text.split(","))
    if field == "rtt_per_hop":
        return tuple(int(x) for x in text.split(","))
    raise ValueError(f"unknown config key {field!r}")


def config_from_spec(spec: dict, **overrides) -> NetworkConfig:
    """Build a NetworkConfig from parsed key=value pairs; non-config keys
    (sweep controls) are ignored here.  An absent arrival_rate is derived
    from the bottleneck channel."""
    kwargs = {}
    for field in NetworkConfig.__dataclass_fields__:
        if field in spec:
            kwargs[field] = _parse_value(field, spec[field])
    kwargs.update(overrides)
    if "arrival_rate" not in kwargs and "erasure_rates" in kwargs:
        kwargs["arrival_rate"] = bottleneck_arrival_rate(kwargs["erasure_rates"])
    cfg = NetworkConfig(**kwargs)
    errors = validate_config(cfg)
    if errors:
        raise ValueError("invalid config: " + "; ".join(errors))
    return cfg


def csv_columns(hops):
    cols = ["protocol", "eps2", "seed", "U"]
    cols += [f"U{n}" for n in range(hops)]
    cols += ["eta", "R_del", "D_mean", "D_max"]
    return cols


def write_csv(rows, path, hops):
    cols = csv_columns(hops)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=cols, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_trace(ledger, path):
    """One line per (slot, node): the action taken, PRE_OP before a node's
    first operational slot."""
    cfg = ledger.cfg
    with open(path, "w") as f:
        for t in range(cfg.horizon):
            for n in range(cfg.hops):
                first = cfg.initial_delay(n)
                if t < first:
                    name = "PRE_OP"
                else:
                    name = ACTION_NAMES[ledger.actions[n][t - first]]
                f.write(f"{t} {n} {name}\n")


def _row(ledger):
    row = summarize(ledger)
    eps = ledger.cfg.erasure_rates
    row["eps2"] = eps[2] if len(eps) > 2 else eps[-1]
    return row


def _out_dir(args):
    out = args.out or os.environ.get("ACNC_OUT", "out")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_run(args) -> int:
    if args.spec:
        cfg = config_from_spec(parse_spec(args.spec))
    else:
        cfg = benchmark_config(0.3, 0)
    if args.slots is not None:
        cfg = replace(cfg, horizon=args.slots)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    ledger = run(cfg, args.protocol, verify=args.verify)
    out = _out_dir(args)
    row = _row(ledger)
    write_csv([row], os.path.join(out, "metrics.csv"), cfg.hops)
    if args.trace:
        write_trace(ledger, os.path.join(out, f"trace_{args.protocol}_{cfg.seed}.txt"))
    print(" ".join(f"{k}={row[k]}" for k in ("protocol", "seed", "U", "eta", "R_del")))
    if ledger.oracle_stats:
        print("oracle:", ledger.oracle_stats)
    return 0


def cmd_sweep(args) -> int:
    if args.spec:
        spec = parse_spec(args.spec)
        base = config_from_spec(spec)
        parameter = spec.get("sweep_parameter", "erasure_rates")
        if "sweep_values" in spec:
            values = [_parse_value(parameter, v)
                      for v in spec["sweep_values"].split(";")]
        else:
            values = [base.__getattribute__(parameter)]
    else:
        base = benchmark_config(0.2, 0)
        parameter = "erasure_rates"
        values = [(0.1, 0.4, e2, 0.3, 0.1) for e2 in (0.2, 0.3, 0.4, 0.5, 0.6)]
    protocols = args.protocols.split(",") if args.protocols else list(PROTOCOLS)
    seeds = list(range(args.seeds))
    out = _out_dir(args)
    rows = []
    for (protocol, value, seed), ledger in iter_sweep(
            base, parameter, values, seeds, protocols, verify=args.verify):
        rows.append(_row(ledger))
        if args.trace:
            write_trace(ledger, os.path.join(
                out, f"trace_{protocol}_{rows[-1]['eps2']}_{seed}.txt"))
    csv_path = os.path.join(out, "sweep.csv")
    write_csv(rows, csv_path, base.hops)
    plot_csv(csv_path, out)
    print(f"wrote {len(rows)} rows to {csv_path}")
    return 0


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    totals = {"opportunities": 0, "rank_deficiencies": 0, "disagreements": 0}
    for _ in range(args.instances):
        hops = args.nodes - 1
        eps = tuple(round(rng.uniform(0.05, 0.5), 3) for _ in range(hops))
        cfg = NetworkConfig(
            node_count=args.nodes, erasure_rates=eps,
            rtt_per_hop=(20,) * hops, horizon=args.slots,
            arrival_rate=bottleneck_arrival_rate(eps),
            delivery_window=min(100, args.slots - 1),
            seed=rng.getrandbits(32))
        ledger = run(cfg, "bs", verify=True)
        for k in totals:
            totals[k] += ledger.oracle_stats[k]
    opp = totals["opportunities"]
    ratio = totals["disagreements"] / opp if opp else 0.0
    print(f"instances={args.instances} opportunities={opp} "
          f"rank_deficiencies={totals['rank_deficiencies']} "
          f"disagreements={totals['disagreements']} ratio={ratio:.6f}")
    return 0 if ratio <= 1e-2 else 1


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _series(rows, protocol, column):
    """(x, y) of per-eps2 means for one protocol."""
    by_x = {}
    for row in rows:
        if row["protocol"] != protocol or row[column] in ("", "nan"):
            continue
        by_x.setdefault(float(row["eps2"]), []).append(float(row[column]))
    xs = sorted(by_x)
    return xs, [sum(by_x[x]) / len(by_x[x]) for x in xs]


def plot_csv(csv_path, out_dir):
    """Render the four result panels (usage, rates, mean delay, max delay)
    from the sweep CSV alone."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = _read_csv(csv_path)
    protocols = sorted({r["protocol"] for r in rows})
    hops = sum(1 for c in rows[0] if c.startswith("U") and c != "U") if rows else 0

    fig, ax = plt.subplots(figsize=(6, 4))
    for proto in protocols:
        xs, ys = _series(rows, proto, "U")
        ax.plot(xs, ys, marker="o", label=f"{proto} end-to-end")
    if "bs" in protocols:
        for n in range(hops):
            xs, ys = _series(rows, "bs", f"U{n}")
            ax.plot(xs, ys, linestyle=":", marker=".", label=f"bs node {n}")
    ax.set_xlabel("middle channel erasure rate")
    ax.set_ylabel("channel usage")
    ax.legend(fontsize=7)
    fig.savefig(os.path.join(out_dir, "usage.png"), dpi=120, bbox_inches="tight")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    for proto in protocols:
        xs, ys = _series(rows, proto, "R_del")
        ax.plot(xs, ys, marker="o", label=f"{proto} delivery rate")
    if "bs" in protocols:
        xs, ys = _series(rows, "bs", "eta")
        ax.plot(xs, ys, linestyle="--", label="bs goodput")
    ax.set_xlabel("middle channel erasure rate")
    ax.set_ylabel("rate")
    ax.legend(fontsize=7)
    fig.savefig(os.path.join(out_dir, "rates.png"), dpi=120, bbox_inches="tight")
    plt.close(fig)

    for column, fname in (("D_mean", "delay_mean.png"), ("D_max", "delay_max.png")):
        fig, ax = plt.subplots(figsize=(6, 4))
        for proto in protocols:
            xs, ys = _series(rows, proto, column)
            ax.plot(xs, ys, marker="o", label=proto)
        ax.set_xlabel("middle channel erasure rate")
        ax.set_ylabel(f"{column} (slots)")
        ax.legend(fontsize=7)
        fig.savefig(os.path.join(out_dir, fname), dpi=120, bbox_inches="tight")
        plt.close(fig)


def cmd_plot(args) -> int:
    out = _out_dir(args)
    plot_csv(args.csv, out)
    print(f"charts written to {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="acnc",
        description="multi-hop adaptive network coding simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation run")
    p_run.add_argument("--spec", help="key=value config file")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--protocol", choices=PROTOCOLS, default="bs")
    p_run.add_argument("--out")
    p_run.add_argument("--slots", type=int)
    p_run.add_argument("--verify", action="store_true")
    p_run.add_argument("--trace", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep with CSV and charts")
    p_sweep.add_argument("--spec")
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--seeds", type=int, default=10)
    p_sweep.add_argument("--protocols", help="comma separated subset")
    p_sweep.add_argument("--verify", action="store_true")
    p_sweep.add_argument("--trace", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="fast accounting vs elimination oracle")
    p_verify.add_argument("--slots", type=int, default=500)
    p_verify.add_argument("--nodes", type=int, default=3)
    p_verify.add_argument("--instances", type=int, default=20)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)

    p_plot = sub.add_parser("plot", help="render charts from a sweep CSV")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--out")
    p_plot.set_defaults(func=cmd_plot)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
