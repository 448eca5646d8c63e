"""Command-line entry points: batch runs, the interactive bridge, and a
standalone NMEA decoder."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import nmea
from .sim import SimConfig, parse_scenario, run_scenario
from .sim.bridge import BridgeServer
from .sim.engine import Simulation
from .sim.scenario import ScenarioParseError


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0,
                        help="transport RNG seed (default 0)")
    parser.add_argument("--latency", type=float, default=2.0,
                        help="SMS delivery latency in virtual seconds")
    parser.add_argument("--loss", type=float, default=0.0,
                        help="SMS loss probability in [0,1]")
    parser.add_argument("--whitelist", default="+923001234567",
                        help="comma-separated owner numbers (max 5)")
    parser.add_argument("--unit-number", default="+920000000000",
                        help="SIM number of the vehicle unit")


def _config(args: argparse.Namespace, horizon: float | None = None) -> SimConfig:
    whitelist = [n.strip() for n in args.whitelist.split(",") if n.strip()]
    cfg = SimConfig(
        whitelist=whitelist,
        unit_number=args.unit_number,
        latency=args.latency,
        loss_prob=args.loss,
        seed=args.seed,
    )
    if horizon is not None:
        cfg.horizon = horizon
    return cfg


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        text = args.scenario.read_text()
    except OSError as exc:
        print(f"cannot read scenario: {exc}", file=sys.stderr)
        return 1
    try:
        events = parse_scenario(text)
    except ScenarioParseError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    transcript = run_scenario(events, _config(args, horizon=args.horizon))
    if transcript.pending_at_horizon:
        print(
            f"warning: {transcript.pending_at_horizon} event(s) still "
            f"pending at horizon {args.horizon}",
            file=sys.stderr,
        )
    if args.transcript is None:
        sys.stdout.write(transcript.render())
    else:
        args.transcript.write_text(transcript.render())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    sim = Simulation(_config(args))
    server = BridgeServer(sim, host=args.host, port=args.port, speed=args.speed)
    server.start()
    print(f"bridge listening on {args.host}:{server.port} "
          f"(speed {args.speed}x, seed {args.seed})")
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    if args.file == "-":
        data = sys.stdin.buffer.read()
    else:
        try:
            data = Path(args.file).read_bytes()
        except OSError as exc:
            print(f"cannot read file: {exc}", file=sys.stderr)
            return 1
    for line_no, raw in enumerate(data.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            sentence = nmea.parse_sentence(raw)
        except nmea.NmeaError as exc:
            print(f"{line_no}: error {type(exc).__name__}: {exc}")
            continue
        try:
            if sentence.talker_and_type.endswith("RMC"):
                fix = nmea.parse_rmc(sentence)
                print(f"{line_no}: RMC {_fix_summary(fix)} "
                      f"speed={fix.speed_knots}")
            elif sentence.talker_and_type.endswith("GGA"):
                fix = nmea.parse_gga(sentence)
                print(f"{line_no}: GGA {_fix_summary(fix)} "
                      f"sats={fix.satellites}")
            else:
                print(f"{line_no}: {sentence.talker_and_type} (ignored)")
        except nmea.NmeaError as exc:
            print(f"{line_no}: error {type(exc).__name__}: {exc}")
    return 0


def _fix_summary(fix: nmea.GpsFix) -> str:
    if fix.latitude is None:
        position = "lat=? lon=?"
    else:
        position = f"lat={fix.latitude:.6f} lon={fix.longitude:.6f}"
    return f"valid={int(fix.valid)} {position} time={fix.utc_time}"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="autosentry",
        description="Simulated GSM/GPS vehicle security unit: intrusion alerts and remote immobilization over SMS",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file in batch mode")
    run_p.add_argument("scenario", type=Path)
    run_p.add_argument("--horizon", type=float, default=120.0,
                       help="virtual seconds to simulate (default 120)")
    run_p.add_argument("--transcript", type=Path, default=None,
                       help="write the transcript here instead of stdout")
    _add_sim_flags(run_p)
    run_p.set_defaults(fn=_cmd_run)

    serve_p = sub.add_parser(
        "serve", help="interactive mode: JSON line bridge on a socket"
    )
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8777)
    serve_p.add_argument("--speed", type=float, default=1.0,
                         help="virtual seconds per wall second")
    _add_sim_flags(serve_p)
    serve_p.set_defaults(fn=_cmd_serve)

    dec_p = sub.add_parser("decode-nmea", help="decode NMEA lines from a file")
    dec_p.add_argument("file", help="path or - for stdin")
    dec_p.set_defaults(fn=_cmd_decode)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
