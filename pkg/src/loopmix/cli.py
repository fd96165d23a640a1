"""Operator entry points.

Three families of subcommands: node runners (mix, provider, client) that bind
a UDP socket and run until interrupted, batch simulators under `sim`, and
closed-form calculators under `analyze` that print one JSON object each. The
`vectors` subcommand emits deterministic packet test vectors for
cross-implementation checks. Exit code 0 on success, 1 on configuration or
runtime failure, 2 on usage errors.
"""

from __future__ import annotations

import asyncio
import json
import math
import random
import sys

import click
import numpy as np

from . import crypto, packet as pkt, transport
from .analysis.attacks import (
    LinkParams,
    blocking_attack_prob,
    delay_attack_prob,
    link_rate,
)
from .analysis.montecarlo import (
    blocking_estimate,
    pool_race_estimate,
    pool_race_estimate_with_loops,
)
from .analysis.pools import (
    PoolObservation,
    entropy_step,
    epsilon_of,
    pool_match_prob,
    pool_match_prob_with_loops,
    steady_pool_size,
)
from .analysis.traces import Trace, Transmission, anonymity_condition_holds, trace_join
from .client import Client, ClientConfig, Rates
from .mixnode import MixConfig, MixNode
from .provider import Provider, ProviderConfig
from .runtime import ClientRuntime, NodeRuntime, configure_logging, resolve_addr
from .simulator import (
    SimConfig,
    TraceSimConfig,
    run_entropy_experiment,
    run_epsilon_batch,
    run_latency_experiment,
    run_pool_experiment,
    run_trace_experiment,
)
from .topology import Topology, load_directory


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _emit(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True))


def _topology(path: str) -> Topology:
    try:
        return load_directory(path)
    except Exception as exc:
        _fail(str(exc))


def _secret_key(path: str) -> bytes:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            key = bytes.fromhex(fh.read().strip())
    except (OSError, ValueError) as exc:
        _fail(f"cannot read key file {path}: {exc}")
    if len(key) != crypto.SECRET_KEY_LEN:
        _fail(f"key file {path} must hold {crypto.SECRET_KEY_LEN} hex-encoded bytes")
    return key


def _check_keypair(secret: bytes, descriptor) -> None:
    if crypto.public_key(secret).data != descriptor.pubkey.data:
        _fail(f"key file does not match directory entry for {descriptor.id}")


async def _serve(runtime, listen: str, metrics_every: float = 10.0):
    host, port = resolve_addr(listen)
    await runtime.start(host, port)
    loop = asyncio.get_running_loop()
    while True:
        await asyncio.sleep(metrics_every)
        click.echo(runtime.mix.metrics_line(loop.time()))


@click.group()
def main() -> None:
    configure_logging()


@main.command()
@click.option("--directory", "directory_path", required=True, help="Directory file path.")
@click.option("--id", "node_id", required=True, help="Mix id as listed in the directory.")
@click.option("--key-file", required=True, help="File holding the hex-encoded secret key.")
@click.option("--listen", default="127.0.0.1:0", show_default=True, help="Bind address.")
@click.option("--lambda-m", type=float, default=0.0, show_default=True, help="Loop rate per second.")
@click.option("--mu", type=float, default=1.0, show_default=True, help="Delay parameter for own loops.")
@click.option("--seed", type=int, default=None, help="RNG seed (stochastic loop stream).")
def mix(directory_path, node_id, key_file, listen, lambda_m, mu, seed):
    """Run a mix node."""
    topology = _topology(directory_path)
    secret = _secret_key(key_file)
    layer_index = None
    descriptor = None
    for i, layer in enumerate(topology.layers):
        for m in layer:
            if m.id == node_id:
                layer_index, descriptor = i, m
    if descriptor is None:
        _fail(f"{node_id!r} is not a mix in the directory")
    _check_keypair(secret, descriptor)
    try:
        cfg = MixConfig(
            secret_key=secret,
            node_id=node_id,
            addr=descriptor.addr,
            layer_index=layer_index,
            lambda_M=lambda_m,
            mu=mu,
        )
    except ValueError as exc:
        _fail(str(exc))
    runtime = NodeRuntime(MixNode(cfg), topology=topology, rng=random.Random(seed))
    try:
        asyncio.run(_serve(runtime, listen))
    except KeyboardInterrupt:
        pass


@main.command()
@click.option("--directory", "directory_path", required=True, help="Directory file path.")
@click.option("--id", "node_id", required=True, help="Provider id as listed in the directory.")
@click.option("--key-file", required=True, help="File holding the hex-encoded secret key.")
@click.option("--listen", default="127.0.0.1:0", show_default=True, help="Bind address.")
@click.option("--pull-max", type=int, default=5, show_default=True, help="Items per pull response.")
@click.option("--inbox-capacity", type=int, default=10_000, show_default=True)
@click.option("--lambda-m", type=float, default=0.0, show_default=True, help="Loop rate per second.")
@click.option("--mu", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=None, help="RNG seed (pull padding, loops).")
def provider(directory_path, node_id, key_file, listen, pull_max, inbox_capacity, lambda_m, mu, seed):
    """Run a provider."""
    topology = _topology(directory_path)
    secret = _secret_key(key_file)
    descriptor = next((p for p in topology.providers if p.id == node_id), None)
    if descriptor is None:
        _fail(f"{node_id!r} is not a provider in the directory")
    _check_keypair(secret, descriptor)
    try:
        cfg = ProviderConfig(
            mix=MixConfig(
                secret_key=secret,
                node_id=node_id,
                addr=descriptor.addr,
                layer_index=0,
                lambda_M=lambda_m,
                mu=mu,
            ),
            pull_max_items=pull_max,
            inbox_capacity=inbox_capacity,
            client_tokens={
                c.id: c.token for c in topology.clients if c.provider_id == node_id
            },
        )
    except ValueError as exc:
        _fail(str(exc))
    runtime = NodeRuntime(Provider(cfg), topology=topology, rng=random.Random(seed))
    try:
        asyncio.run(_serve(runtime, listen))
    except KeyboardInterrupt:
        pass


async def _run_client(runtime: ClientRuntime, listen: str):
    host, port = resolve_addr(listen)
    await runtime.start(host, port)
    seen = 0
    while True:
        await asyncio.sleep(1.0)
        for message in runtime.received_messages[seen:]:
            click.echo(message.decode(errors="replace"))
        seen = len(runtime.received_messages)


@main.command()
@click.option("--directory", "directory_path", required=True, help="Directory file path.")
@click.option("--id", "client_id", required=True, help="Client id as listed in the directory.")
@click.option("--key-file", required=True, help="File holding the hex-encoded secret key.")
@click.option("--listen", default="127.0.0.1:0", show_default=True, help="Bind address.")
@click.option("--lambda-p", type=float, default=0.5, show_default=True, help="Payload rate per second.")
@click.option("--lambda-l", type=float, default=0.5, show_default=True, help="Loop rate per second.")
@click.option("--lambda-d", type=float, default=0.5, show_default=True, help="Drop rate per second.")
@click.option("--mu", type=float, default=1.0, show_default=True, help="Per-hop delay parameter.")
@click.option("--pull-interval", type=float, default=10.0, show_default=True, help="Seconds between pulls.")
@click.option("--pull-max", type=int, default=5, show_default=True, help="Items per pull response.")
@click.option("--send", multiple=True, help="recipient_id:text message to enqueue at start.")
@click.option("--seed", type=int, default=None, help="RNG seed (all three streams).")
def client(directory_path, client_id, key_file, listen, lambda_p, lambda_l, lambda_d, mu,
           pull_interval, pull_max, send, seed):
    """Run a client: cover streams, queued payloads, periodic pulls."""
    topology = _topology(directory_path)
    secret = _secret_key(key_file)
    try:
        descriptor = topology.client(client_id)
    except Exception as exc:
        _fail(str(exc))
    _check_keypair(secret, descriptor)
    try:
        cfg = ClientConfig(
            client_id=client_id,
            secret_key=secret,
            provider_id=descriptor.provider_id,
            token=descriptor.token,
            rates=Rates(lambda_p, lambda_l, lambda_d, 0.0, mu),
            pull_interval_s=pull_interval,
            pull_max_items=pull_max,
        )
    except ValueError as exc:
        _fail(str(exc))
    node = Client(cfg)
    for spec in send:
        recipient, _, text = spec.partition(":")
        try:
            node.enqueue_message(recipient, text.encode())
        except Exception as exc:
            _fail(f"cannot enqueue {spec!r}: {exc}")
    runtime = ClientRuntime(node, topology, random.Random(seed))
    try:
        asyncio.run(_run_client(runtime, listen))
    except KeyboardInterrupt:
        pass


@main.group()
def sim() -> None:
    """Seeded batch simulations."""


@sim.command("pool")
@click.option("--lambda", "lambda_in", type=float, required=True, help="Arrival rate per second.")
@click.option("--mu", type=float, required=True, help="Delay parameter per second.")
@click.option("--duration", type=float, default=1000.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV of (time,size) samples.")
def sim_pool(lambda_in, mu, duration, seed, out):
    """Simulate one pool under Poisson load."""
    try:
        run = run_pool_experiment(lambda_in, mu, duration, seed)
    except ValueError as exc:
        _fail(str(exc))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("time,size\n")
            for i, size in enumerate(run.sampled_sizes):
                fh.write(f"{i * 1.0},{size}\n")
    _emit(
        {
            "lambda": lambda_in,
            "mu": mu,
            "duration": duration,
            "time_avg_size": run.time_avg_size,
            "expected_size": steady_pool_size(lambda_in, mu),
            "departures": len(run.departure_times),
        }
    )


@sim.command("entropy")
@click.option("--lambda", "lambda_in", type=float, required=True, help="Arrival rate per second.")
@click.option("--mu", type=float, required=True, help="Delay parameter per second.")
@click.option("--duration", type=float, default=200.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV of (time,entropy) points.")
def sim_entropy(lambda_in, mu, duration, seed, out):
    """Track per-departure entropy of one pool."""
    try:
        run = run_entropy_experiment(lambda_in, mu, duration, seed)
    except ValueError as exc:
        _fail(str(exc))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("time,entropy\n")
            for t, h in run.series:
                fh.write(f"{t},{h}\n")
    _emit(
        {
            "lambda": lambda_in,
            "mu": mu,
            "duration": duration,
            "steady_entropy": run.steady_mean,
            "departures": len(run.series),
        }
    )


@sim.command("latency")
@click.option("--mu", type=float, required=True, help="Per-hop delay parameter per second.")
@click.option("--hops", type=int, default=4, show_default=True)
@click.option("--n", "n_messages", type=int, default=10_000, show_default=True)
@click.option("--processing", type=float, default=0.0, show_default=True, help="Fixed seconds per hop.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV of latency samples.")
def sim_latency(mu, hops, n_messages, processing, seed, out):
    """Sample end-to-end latencies over a fixed-length path."""
    try:
        samples = run_latency_experiment(
            Rates(1.0, 0.0, 0.0, 0.0, mu), hops, n_messages, seed, processing_s=processing
        )
    except ValueError as exc:
        _fail(str(exc))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("latency_s\n")
            for s in samples:
                fh.write(f"{s}\n")
    _emit(
        {
            "mu": mu,
            "hops": hops,
            "n": n_messages,
            "mean_s": float(np.mean(samples)),
            "std_s": float(np.std(samples, ddof=1)),
        }
    )


@sim.command("epsilon")
@click.option("--users", type=int, required=True, help="Total sender count.")
@click.option("--lambda", "lambda_p", type=float, required=True, help="Per-user payload rate.")
@click.option("--mu", type=float, required=True, help="Mix delay parameter.")
@click.option("--layers", type=int, required=True)
@click.option("--per-layer", type=int, required=True, help="Mixes per layer.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--corrupt-fraction", type=float, default=0.0, show_default=True)
@click.option("--lambda-loop", type=float, default=0.0, show_default=True, help="Per-user loop rate.")
@click.option("--lambda-drop", type=float, default=0.0, show_default=True, help="Per-user drop rate.")
@click.option("--lambda-mix", type=float, default=0.0, show_default=True, help="Per-mix loop rate.")
@click.option("--burn-in", type=float, default=25.0, show_default=True)
@click.option("--run-time", type=float, default=100.0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV table (param,mean_eps,std).")
def sim_epsilon(users, lambda_p, mu, layers, per_layer, reps, seed, corrupt_fraction,
                lambda_loop, lambda_drop, lambda_mix, burn_in, run_time, out):
    """Estimate sender indistinguishability for one configuration."""
    try:
        cfg = SimConfig(
            seed=seed,
            U=users,
            rates=Rates(lambda_p, lambda_loop, lambda_drop, lambda_mix, mu),
            layers=layers,
            nodes_per_layer=per_layer,
            corrupt_fraction=corrupt_fraction,
            burn_in=burn_in,
            run_time=run_time,
            challenge=(0, 1),
        )
        batch = run_epsilon_batch(cfg, reps)
    except ValueError as exc:
        _fail(str(exc))
    param = (
        f"users={users};lambda={lambda_p};mu={mu};layers={layers};"
        f"per_layer={per_layer};corrupt={corrupt_fraction}"
    )
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("param,mean_eps,std\n")
            fh.write(f"{param},{batch.mean},{batch.std}\n")
    _emit(
        {
            "param": param,
            "mean_eps": batch.mean,
            "std_eps": batch.std,
            "reps": reps,
            "finite_reps": batch.n_finite,
        }
    )


@main.group()
def analyze() -> None:
    """Closed-form calculators; each prints one JSON object."""


@analyze.command("pool")
@click.option("--n", type=int, required=True, help="Messages observed entering the pool.")
@click.option("--k", type=int, required=True, help="How many of those remain.")
@click.option("--l", "l_late", type=int, required=True, help="Later arrivals present.")
@click.option("--trials", type=int, default=0, show_default=True, help="Add a Monte-Carlo check.")
@click.option("--mu", type=float, default=1.0, show_default=True, help="Delay parameter for the check.")
@click.option("--seed", type=int, default=0, show_default=True)
def analyze_pool(n, k, l_late, trials, mu, seed):
    """Match probabilities for a departure from an observed pool."""
    try:
        probs = pool_match_prob(PoolObservation(n, k, l_late))
    except ValueError as exc:
        _fail(str(exc))
    result = {"p_initial": probs.p_initial, "p_late": probs.p_late}
    if trials > 0:
        est = pool_race_estimate(n, k, l_late, mu, trials, np.random.default_rng(seed))
        result["mc_p_initial"], result["mc_p_late"] = est[0], est[1]
    _emit(result)


@analyze.command("pool-loops")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--l", "l_late", type=int, required=True)
@click.option("--mu", type=float, required=True)
@click.option("--lambda-m", type=float, required=True, help="Mix loop rate.")
@click.option("--trials", type=int, default=0, show_default=True, help="Add a Monte-Carlo check.")
@click.option("--seed", type=int, default=0, show_default=True)
def analyze_pool_loops(n, k, l_late, mu, lambda_m, trials, seed):
    """Match probabilities when the mix adds its own loop traffic."""
    try:
        probs = pool_match_prob_with_loops(PoolObservation(n, k, l_late), mu, lambda_m)
    except ValueError as exc:
        _fail(str(exc))
    result = {
        "p_initial": probs.p_initial,
        "p_late": probs.p_late,
        "p_loop": probs.p_loop,
        "p_noloop": probs.p_noloop,
    }
    if trials > 0:
        est = pool_race_estimate_with_loops(
            n, k, l_late, mu, lambda_m, trials, np.random.default_rng(seed)
        )
        result["mc_p_initial"] = est[0]
        result["mc_p_late"] = est[1]
        result["mc_p_loop"] = est[2]
    _emit(result)


@analyze.command("entropy-step")
@click.option("--h-prev", type=float, required=True, help="Entropy carried by held messages.")
@click.option("--k", type=int, required=True, help="Fresh arrivals since the last departure.")
@click.option("--l", "l_held", type=int, required=True, help="Held messages in the pool.")
def analyze_entropy_step(h_prev, k, l_held):
    """One incremental entropy update."""
    try:
        _emit({"entropy": entropy_step(h_prev, k, l_held)})
    except ValueError as exc:
        _fail(str(exc))


@analyze.command("epsilon")
@click.option("--p0", type=float, required=True)
@click.option("--p1", type=float, required=True)
def analyze_epsilon(p0, p1):
    """Indistinguishability bound |ln(p0/p1)|."""
    try:
        eps = epsilon_of(p0, p1)
    except ValueError as exc:
        _fail(str(exc))
    _emit({"epsilon": "inf" if math.isinf(eps) else eps})


@analyze.command("blocking")
@click.option("--s", type=float, required=True, help="Fraction denominator: adversary lets 1/s through.")
@click.option("--mu", type=float, required=True)
@click.option("--lambda-m", type=float, required=True, help="Mix loop rate.")
@click.option("--lambda-r", type=float, required=True, help="Honest packet rate into the mix.")
@click.option("--trials", type=int, default=0, show_default=True, help="Add a Monte-Carlo check.")
@click.option("--seed", type=int, default=0, show_default=True)
def analyze_blocking(s, mu, lambda_m, lambda_r, trials, seed):
    """Chance a blocking adversary isolates the target message."""
    try:
        prob = blocking_attack_prob(s, mu, lambda_m, lambda_r)
    except ValueError as exc:
        _fail(str(exc))
    result = {"probability": prob}
    if trials > 0:
        result["mc_probability"] = blocking_estimate(
            s, mu, lambda_m, lambda_r, trials, np.random.default_rng(seed)
        )
    _emit(result)


@analyze.command("delay-attack")
@click.option("--k-links", type=int, required=True, help="Outgoing links per node.")
@click.option("--link-rate", "rate", type=float, required=True, help="Per-link traffic rate.")
@click.option("--delta", type=float, required=True, help="Adversarial added delay.")
@click.option("--time", "t", type=float, default=0.0, show_default=True, help="Attack start time.")
def analyze_delay_attack(k_links, rate, delta, t):
    """Chance a delayed packet leaves no candidate cover on any link."""
    try:
        _emit({"probability": delay_attack_prob(k_links, rate, delta, t)})
    except ValueError as exc:
        _fail(str(exc))


@analyze.command("link-rate")
@click.option("--users", type=int, required=True)
@click.option("--n-mixes", type=int, required=True, help="Total mixes.")
@click.option("--n-providers", type=int, required=True)
@click.option("--k-links", type=int, required=True, help="Outgoing links per node.")
@click.option("--ell", type=int, required=True, help="Mix layers per path.")
@click.option("--lambda-p", type=float, required=True)
@click.option("--lambda-l", type=float, required=True)
@click.option("--lambda-d", type=float, required=True)
@click.option("--lambda-m", type=float, required=True)
@click.option("--mu", type=float, default=1.0, show_default=True)
def analyze_link_rate(users, n_mixes, n_providers, k_links, ell, lambda_p, lambda_l,
                      lambda_d, lambda_m, mu):
    """Expected traffic rate on a single inter-node link."""
    try:
        params = LinkParams(
            U=users,
            N=n_mixes,
            P=n_providers,
            k_links=k_links,
            ell=ell,
            rates=Rates(lambda_p, lambda_l, lambda_d, lambda_m, mu),
        )
        _emit({"rate": link_rate(params)})
    except ValueError as exc:
        _fail(str(exc))


@analyze.command("steady-pool")
@click.option("--lambda", "lambda_in", type=float, required=True)
@click.option("--mu", type=float, required=True)
def analyze_steady_pool(lambda_in, mu):
    """Mean pool size at steady state."""
    try:
        _emit({"size": steady_pool_size(lambda_in, mu)})
    except ValueError as exc:
        _fail(str(exc))


def _trace_from_json(raw) -> Trace:
    return tuple(
        Transmission(
            sender=str(r["sender"]),
            time=float(r["time"]),
            handle=str(r["handle"]),
            recipient=str(r["recipient"]),
        )
        for r in raw
    )


def _load_traces(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot load traces from {path}: {exc}")
    return doc


@analyze.command("trace-join")
@click.option("--traces-file", required=True, help='JSON file: {"traces": [[transmission,...],...]}.')
@click.option("--x", "x_idx", type=int, required=True, help="Index of the earlier trace.")
@click.option("--y", "y_idx", type=int, required=True, help="Index of the later trace.")
@click.option("--i", "hop", type=int, required=True, help="1-based hop at which to join.")
def analyze_trace_join(traces_file, x_idx, y_idx, hop):
    """Whether two observed traces could be one route switched at a hop."""
    doc = _load_traces(traces_file)
    try:
        traces = [_trace_from_json(t) for t in doc["traces"]]
        result = trace_join(traces[x_idx], traces[y_idx], hop)
    except (KeyError, IndexError, TypeError) as exc:
        _fail(f"bad traces file: {exc}")
    except Exception as exc:
        _fail(str(exc))
    _emit({"join": result})


@analyze.command("anon-condition")
@click.option("--traces-file", default=None,
              help='JSON file: {"challenge": [trace, trace], "drops": [...], "compromised": [...]}.')
@click.option("--simulate", is_flag=True, help="Generate traces with the drop-traffic simulator.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--users", type=int, default=20, show_default=True)
@click.option("--hops", type=int, default=3, show_default=True)
@click.option("--duration", type=float, default=10.0, show_default=True)
@click.option("--lambda-d", type=float, default=1.0, show_default=True)
def analyze_anon_condition(traces_file, simulate, seed, users, hops, duration, lambda_d):
    """Whether plausible alternative routings hide the challenge senders."""
    if simulate:
        try:
            run = run_trace_experiment(
                TraceSimConfig(
                    seed=seed, n_users=users, hops=hops, duration=duration, lambda_D=lambda_d
                )
            )
        except ValueError as exc:
            _fail(str(exc))
        challenge, drops, compromised = run.challenge, run.drop_traces, frozenset()
    elif traces_file:
        doc = _load_traces(traces_file)
        try:
            challenge = (
                _trace_from_json(doc["challenge"][0]),
                _trace_from_json(doc["challenge"][1]),
            )
            drops = [_trace_from_json(t) for t in doc.get("drops", [])]
            compromised = frozenset(doc.get("compromised", []))
        except (KeyError, IndexError, TypeError) as exc:
            _fail(f"bad traces file: {exc}")
    else:
        raise click.UsageError("need --traces-file or --simulate")
    try:
        holds = anonymity_condition_holds(challenge, drops, compromised)
    except Exception as exc:
        _fail(str(exc))
    _emit({"holds": holds, "drop_traces": len(drops)})


def generate_vectors(seed: int, cases: int) -> dict:
    """Deterministic packet vectors: keys, path, per-hop state, final payload."""
    rng = random.Random(seed)
    out = []
    for case_idx in range(cases):
        nu = case_idx % pkt.MAX_HOPS + 1
        secrets, pubs = [], []
        for _ in range(nu):
            sk, pub = crypto.generate_keypair(rng)
            secrets.append(sk)
            pubs.append(pub)
        hops = [
            pkt.HopSpec(
                next_addr=f"10.0.0.{i + 1}:9{i:03d}",
                delay_s=round(rng.expovariate(1.0), 6),
                flags=pkt.HopFlags.FINAL if i == nu - 1 else pkt.HopFlags.NONE,
            )
            for i in range(nu)
        ]
        message = rng.randbytes(rng.randrange(0, pkt.MESSAGE_CAPACITY + 1))
        recipient = f"client-{case_idx}"
        packet, trace = pkt.build_packet(
            list(zip(pubs, hops)), recipient, message, rng
        )
        per_hop = []
        current = packet
        for i, sk in enumerate(secrets):
            step = {"alpha": current.header.alpha.data.hex(), "mac": current.header.mac.hex()}
            result = pkt.process_packet(sk, current)
            per_hop.append(step)
            if isinstance(result, pkt.Relay):
                current = result.packet
            else:
                step["delivered_to"] = result.recipient_id
        out.append(
            {
                "path_len": nu,
                "node_secret_keys": [s.hex() for s in secrets],
                "node_public_keys": [p.data.hex() for p in pubs],
                "hops": [
                    {"next_addr": h.next_addr, "delay_s": h.delay_s, "flags": h.flags.value}
                    for h in hops
                ],
                "recipient_id": recipient,
                "message": message.hex(),
                "packet": packet.to_bytes().hex(),
                "per_hop_alpha": [s["alpha"] for s in per_hop],
                "sender_alphas": [a.data.hex() for a in trace.alphas],
                "final_payload": message.hex(),
            }
        )
    return {
        "group": "curve25519 (x25519 key agreement, 32-byte little-endian points)",
        "kdf": "hkdf-sha256 with loopmix-* labels",
        "stream": "chacha20 keystream for header and payload masking",
        "payload_aead": "chacha20-poly1305, zero nonce, single-use key",
        "seed": seed,
        "cases": out,
    }


@main.command()
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--cases", type=int, default=10, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write JSON here instead of stdout.")
def vectors(seed, cases, out):
    """Emit deterministic packet test vectors."""
    doc = generate_vectors(seed, cases)
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
