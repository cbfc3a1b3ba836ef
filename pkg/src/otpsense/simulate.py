"""Round-based simulator: scenario config, round engine, parameter sweeps.

A scenario fixes the channel model, the user population (roles and detector
profiles), the pad subset construction, the fusion rule and the horizon.
`run_round` executes one slot in the protocol's phase order: channel
evolution, sensing, publication, attacks, full-mesh exchange, recovery and
decryption, fusion.  `run_simulation` loops rounds and aggregates metrics;
`run_experiment` sweeps one or two scenario parameters, each sweep point on
an independent random stream derived from (seed, point index), optionally on
a process pool.

Randomness is split into named streams (channel evolution, per-user sensing,
pad draws, attacker choices, vote tie-breaks) spawned from the scenario seed,
so runs with the protocol enabled and disabled see identical channel truth
and detector noise, and results never depend on worker scheduling.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, replace
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import adversary, fusion, leakage, protocol, spectrum

ROLES = ("honest", "ees", "pes", "history")
SWEEPABLE = ("channels", "pairs", "phi", "selfish", "rounds", "slot_period")


@dataclass(frozen=True)
class UserSpec:
    """One participant: role plus detector quality.

    false_alarm/miss are scalars (applied to every channel) or per-channel
    tuples.  sensed_channels is read only for the "pes" role: the attacker
    honestly senses that many channels from the start of the band.
    """

    role: str = "honest"
    false_alarm: float | tuple = 0.1
    miss: float | tuple = 0.1
    sensed_channels: int = 0

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}, expected one of {ROLES}")
        if self.sensed_channels < 0:
            raise ValueError("sensed_channels must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Complete, picklable description of one simulation.

    Subset construction precedence: p_target (size the block length from the
    predicted agreement probability, scaled by omega) > phi (explicit block
    length, scaled by omega) > pairs (that many independent complement
    pairs).  encrypted=False bypasses pads entirely and shares raw reports
    (the plaintext baseline the protocol is benchmarked against).
    """

    num_channels: int = 100
    rate_on: float | tuple = 50.0
    rate_off: float | tuple = 50.0
    slot_period: float = 0.01
    users: tuple[UserSpec, ...] = (UserSpec(),) * 5
    pairs: int | None = 1
    phi: int | None = None
    p_target: float | None = None
    omega: float = 1.0
    fusion_threshold: int | None = None
    include_self: bool = True
    rounds: int = 350
    seed: int = 0
    encrypted: bool = True
    ees_modification: float = 0.0
    ees_copy_previous_round: bool = False
    selfish_role: str = "ees"

    def __post_init__(self):
        if isinstance(self.users, list):
            object.__setattr__(self, "users", tuple(self.users))
        if not self.users:
            raise ValueError("scenario needs at least one user")
        if not any(u.role == "honest" for u in self.users):
            raise ValueError("scenario needs at least one honest user")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.num_channels < 1:
            raise ValueError("num_channels must be >= 1")
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        if self.selfish_role not in ROLES or self.selfish_role == "honest":
            raise ValueError("selfish_role must be an attacker role")
        if self.pairs is None and self.phi is None and self.p_target is None:
            raise ValueError("one of pairs/phi/p_target must be set")
        if self.fusion_threshold is not None and self.fusion_threshold < 1:
            raise ValueError("fusion_threshold must be >= 1")
        for u in self.users:
            if u.role == "pes" and not 0 <= u.sensed_channels <= self.num_channels:
                raise ValueError("pes sensed_channels must lie in [0, num_channels]")


def channel_model(sc: Scenario) -> spectrum.ChannelModel:
    return spectrum.ChannelModel(sc.num_channels, sc.rate_on, sc.rate_off, sc.slot_period)


def detector_profiles(sc: Scenario) -> list[spectrum.DetectorProfile]:
    out = []
    for u in sc.users:
        fa = np.broadcast_to(np.asarray(u.false_alarm, dtype=float), (sc.num_channels,))
        ms = np.broadcast_to(np.asarray(u.miss, dtype=float), (sc.num_channels,))
        out.append(spectrum.DetectorProfile(fa.copy(), ms.copy()))
    return out


def build_subset(sc: Scenario, rng: np.random.Generator) -> protocol.PadSubset:
    """Materialize the scenario's pad subset (see Scenario precedence)."""
    if sc.p_target is not None:
        profiles = detector_profiles(sc)
        honest = [p for p, u in zip(profiles, sc.users) if u.role == "honest"]
        pair = honest[:2] if len(honest) > 1 else [honest[0], honest[0]]
        occupancy = spectrum.stationary_occupancy(channel_model(sc))
        eta = protocol.agreement_probability(pair[0], pair[1], occupancy)
        width = protocol.invert_success_rate(sc.p_target, float(eta.min()))
    elif sc.phi is not None:
        width = sc.phi
    else:
        return protocol.generate_pairs(sc.num_channels, sc.pairs, rng)
    width = min(sc.num_channels, int(np.ceil(sc.omega * width)))
    return protocol.generate_subset(sc.num_channels, width, rng)


@dataclass(frozen=True, eq=False)
class RoundResult:
    """Everything one round produced (arrays indexed by user)."""

    truth: np.ndarray
    reports: np.ndarray
    ciphertexts: np.ndarray
    pads: np.ndarray | None
    deliveries: np.ndarray
    recovery_success: np.ndarray | None  # (N, N) float, NaN where not attempted
    decisions: dict[int, np.ndarray]     # honest user index -> fused vector
    decision: np.ndarray                 # designated recipient's fused vector
    attacks: dict[int, adversary.AttackOutcome]


@dataclass
class _Streams:
    channel: np.random.Generator
    pads: np.random.Generator
    attacker: np.random.Generator
    ties: np.random.Generator
    subset: np.random.Generator
    sensing: list[np.random.Generator]


def _spawn_streams(seed: int, num_users: int) -> _Streams:
    keys = np.random.SeedSequence(seed).spawn(5 + num_users)
    return _Streams(
        channel=np.random.default_rng(keys[0]),
        pads=np.random.default_rng(keys[1]),
        attacker=np.random.default_rng(keys[2]),
        ties=np.random.default_rng(keys[3]),
        subset=np.random.default_rng(keys[4]),
        sensing=[np.random.default_rng(k) for k in keys[5:]],
    )


@dataclass
class _State:
    """Mutable carry-over between rounds."""

    truth: np.ndarray | None = None
    prev_reports: dict[int, np.ndarray] = field(default_factory=dict)
    prev_ciphertexts: list[np.ndarray] = field(default_factory=list)
    round_index: int = 0


def run_round(
    sc: Scenario,
    subset: protocol.PadSubset | None,
    model: spectrum.ChannelModel,
    profiles: list[spectrum.DetectorProfile],
    state: _State,
    streams: _Streams,
) -> RoundResult:
    """Execute one slot; mutates `state` for the next call.

    Phase order: channel evolution, sensing, publication (honest and
    stale-report users first, copiers second), attack measurement against
    the designated target, full-mesh delivery accounting, recovery and
    decryption by every honest user, per-user fusion.
    """
    n = len(sc.users)
    m = sc.num_channels
    truth = spectrum.sample_states(model, streams.channel, previous=state.truth)

    # sensing: every role draws a full vector from its own stream (keeps
    # streams aligned across role reassignments); pes reads only its prefix
    sensed = [spectrum.sense(truth, profiles[i], streams.sensing[i]) for i in range(n)]

    reports = np.zeros((n, m), dtype=np.uint8)
    ciphertexts = np.zeros((n, m), dtype=np.uint8)
    pads = np.zeros((n, m), dtype=np.uint8) if sc.encrypted else None
    # recovery is only scorable against senders whose pad is well defined
    # (a forwarded copy of unknown provenance has none)
    pad_known = np.zeros(n, dtype=bool)
    attacks: dict[int, adversary.AttackOutcome] = {}

    target = _designated_recipient(sc)
    attack_round = state.round_index % 2 == 1

    def publish(i: int, report: np.ndarray) -> None:
        reports[i] = report
        pad_known[i] = True
        if sc.encrypted:
            ciphertexts[i], pads[i] = protocol.encrypt_report(report, subset, streams.pads)
        else:
            ciphertexts[i] = report

    # phase 1: users that have something of their own to publish
    copiers = []
    for i, u in enumerate(sc.users):
        if u.role == "honest":
            publish(i, sensed[i])
        elif u.role == "history":
            stale = state.prev_reports.get(i)
            if attack_round and stale is not None:
                publish(i, stale)
            else:
                publish(i, sensed[i])
        else:
            copiers.append(i)

    honest_idx = [i for i, u in enumerate(sc.users) if u.role == "honest"]
    observable = (
        state.prev_ciphertexts
        if sc.ees_copy_previous_round and state.prev_ciphertexts
        else [ciphertexts[i] for i in honest_idx]
    )
    provenance = (
        None if sc.ees_copy_previous_round and state.prev_ciphertexts
        else honest_idx
    )

    # phase 2: copiers (ees forwards a copy, pes fills its gaps by cracking)
    for i in copiers:
        u = sc.users[i]
        if u.role == "ees":
            forged = adversary.ees_act(observable, streams.attacker, sc.ees_modification)
            ciphertexts[i] = forged
            if provenance is not None and sc.ees_modification == 0.0:
                # verbatim intra-round copy: provenance is whichever honest
                # ciphertext it equals (content, hence pad, is inherited)
                src = next(j for j in provenance if np.array_equal(ciphertexts[j], forged))
                reports[i] = reports[src]
                if sc.encrypted:
                    pads[i] = pads[src]
                    pad_known[i] = True
            elif not sc.encrypted:
                reports[i] = forged
        else:  # pes
            mask = np.arange(u.sensed_channels)
            partial = np.zeros(m, dtype=np.uint8)
            partial[mask] = sensed[i][mask]
            if sc.encrypted:
                outcome = adversary.pes_act(
                    mask, partial, ciphertexts[target], subset,
                    streams.attacker, true_pad=pads[target],
                )
                attacks[i] = outcome
                merged = outcome.guessed_states.copy()
            else:
                merged = reports[target].copy()
            merged[mask] = sensed[i][mask]
            publish(i, merged)

    # phase 3: remaining attack measurements against the designated target
    if sc.encrypted:
        for i, u in enumerate(sc.users):
            if u.role == "ees":
                attacks[i] = adversary.ees_decode_attempt(
                    ciphertexts[target], subset, streams.attacker, true_pad=pads[target]
                )
            elif u.role == "history" and attack_round and i in state.prev_reports:
                attacks[i] = adversary.history_act(
                    state.prev_reports[i], ciphertexts[target], subset,
                    streams.attacker, true_pad=pads[target],
                )

    # phase 4: full-mesh exchange accounting
    deliveries = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)

    # phase 5: recovery + decryption by every honest user; phase 6: fusion
    recovery = np.full((n, n), np.nan) if sc.encrypted else None
    decisions: dict[int, np.ndarray] = {}
    for r in honest_idx:
        rows = [reports[r]] if sc.include_self else []
        for s in range(n):
            if s == r:
                continue
            if sc.encrypted:
                pad = protocol.recover_pad(reports[r], ciphertexts[s], subset, streams.ties)
                if pad_known[s]:
                    recovery[r, s] = float(np.array_equal(pad, pads[s]))
                rows.append(protocol.decrypt(ciphertexts[s], pad))
            else:
                rows.append(ciphertexts[s])
        rule = (
            fusion.FusionRule(sc.fusion_threshold, len(rows))
            if sc.fusion_threshold is not None
            else fusion.FusionRule.majority(len(rows))
        )
        decisions[r] = fusion.fuse(np.stack(rows), rule)

    state.truth = truth
    state.prev_reports = {i: sensed[i] for i, u in enumerate(sc.users) if u.role == "history"}
    state.prev_ciphertexts = [ciphertexts[i].copy() for i in honest_idx]
    state.round_index += 1
    return RoundResult(
        truth=truth,
        reports=reports,
        ciphertexts=ciphertexts,
        pads=pads,
        deliveries=deliveries,
        recovery_success=recovery,
        decisions=decisions,
        decision=decisions[target],
        attacks=attacks,
    )


def _designated_recipient(sc: Scenario) -> int:
    return next(i for i, u in enumerate(sc.users) if u.role == "honest")


@dataclass(frozen=True, eq=False)
class SimulationSummary:
    """Aggregates over one scenario run."""

    scenario: Scenario
    metrics: fusion.SensingMetrics
    honest_recovery_rate: float | None
    target_recovery_rate: float | None
    attacker_success: dict[int, float]
    attacker_attempts: dict[int, int]
    ees_contingency: np.ndarray
    mean_masking_level: float | None

    def row(self) -> dict:
        r = {
            "rounds": self.scenario.rounds,
            "seed": self.scenario.seed,
            "false_positive_rate": self.metrics.false_positive_rate,
            "false_negative_rate": self.metrics.false_negative_rate,
            "honest_recovery_rate": self.honest_recovery_rate,
            "target_recovery_rate": self.target_recovery_rate,
            "mean_masking_level": self.mean_masking_level,
        }
        if self.attacker_success:
            r["attacker_success_rate"] = float(np.mean(list(self.attacker_success.values())))
        else:
            r["attacker_success_rate"] = None
        return r


def run_simulation(sc: Scenario) -> SimulationSummary:
    """Run the configured horizon and aggregate.

    Recovery rates: honest_recovery_rate pools every honest recipient ->
    sender pair; target_recovery_rate restricts to other honest users
    recovering the designated recipient's own publications, which is the
    honest benchmark the attacker numbers compare against (attackers aim at
    the same target).
    """
    streams = _spawn_streams(sc.seed, len(sc.users))
    model = channel_model(sc)
    profiles = detector_profiles(sc)
    subset = build_subset(sc, streams.subset) if sc.encrypted else None
    state = _State()
    target = _designated_recipient(sc)

    truths = np.empty((sc.rounds, sc.num_channels), dtype=np.uint8)
    decisions = np.empty_like(truths)
    rec_ok = rec_all = 0
    tgt_ok = tgt_all = 0
    attack_ok: dict[int, int] = {}
    attack_all: dict[int, int] = {}
    contingency = np.zeros((2, 2), dtype=np.int64)

    for t in range(sc.rounds):
        rr = run_round(sc, subset, model, profiles, state, streams)
        truths[t] = rr.truth
        decisions[t] = rr.decision
        if rr.recovery_success is not None:
            ok = rr.recovery_success[~np.isnan(rr.recovery_success)]
            rec_ok += int(ok.sum())
            rec_all += ok.size
            col = rr.recovery_success[:, target]
            col = col[~np.isnan(col)]
            tgt_ok += int(col.sum())
            tgt_all += col.size
        for i, outcome in rr.attacks.items():
            attack_all[i] = attack_all.get(i, 0) + 1
            attack_ok[i] = attack_ok.get(i, 0) + int(bool(outcome.pad_recovered))
            if sc.users[i].role == "ees":
                idx = 2 * rr.truth + outcome.guessed_states
                contingency += np.bincount(idx, minlength=4).reshape(2, 2)

    masking = None
    if sc.encrypted:
        occupancy = spectrum.stationary_occupancy(model)
        per = [
            leakage.masking_level(subset, float(occupancy[i]), profiles[target], i)
            for i in range(sc.num_channels)
        ]
        masking = float(np.mean(per))

    return SimulationSummary(
        scenario=sc,
        metrics=fusion.score(decisions, truths),
        honest_recovery_rate=rec_ok / rec_all if rec_all else None,
        target_recovery_rate=tgt_ok / tgt_all if tgt_all else None,
        attacker_success={i: attack_ok[i] / attack_all[i] for i in attack_all},
        attacker_attempts=attack_all,
        ees_contingency=contingency,
        mean_masking_level=masking,
    )


# ---- parameter sweeps -------------------------------------------------


def apply_sweep(sc: Scenario, assignment: dict) -> Scenario:
    """Return a scenario with sweep parameters substituted.

    "selfish" converts the last k users to scenario.selfish_role (the base
    population must be honest); the other names map onto scenario fields
    ("channels" -> num_channels, "pairs", "phi", "rounds", "slot_period").
    """
    out = sc
    for name, value in assignment.items():
        if name == "channels":
            out = replace(out, num_channels=int(value))
        elif name == "pairs":
            out = replace(out, pairs=int(value), phi=None, p_target=None)
        elif name == "phi":
            out = replace(out, phi=int(value), pairs=None, p_target=None)
        elif name == "rounds":
            out = replace(out, rounds=int(value))
        elif name == "slot_period":
            out = replace(out, slot_period=float(value))
        elif name == "selfish":
            k = int(value)
            if k >= len(out.users):
                raise ValueError("selfish count must leave at least one honest user")
            if any(u.role != "honest" for u in out.users):
                raise ValueError('sweeping "selfish" needs an all-honest base population')
            users = list(out.users)
            for i in range(len(users) - k, len(users)):
                users[i] = replace(
                    users[i],
                    role=out.selfish_role,
                    sensed_channels=users[i].sensed_channels,
                )
            out = replace(out, users=tuple(users))
        else:
            raise ValueError(f"unknown sweep parameter {name!r}, expected one of {SWEEPABLE}")
    return out


def _point_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def _run_point(args) -> dict:
    sc, sweep_names, assignment, index = args
    point = apply_sweep(sc, assignment)
    point = replace(point, seed=_point_seed(sc.seed, index))
    summary = run_simulation(point)
    row = {name: assignment[name] for name in sweep_names}
    row["point"] = index
    row.update(summary.row())
    return row


def run_experiment(
    sc: Scenario,
    sweep: list[tuple[str, list]],
    workers: int = 1,
) -> list[dict]:
    """Cross-product sweep over one or two parameters.

    Every point runs `run_simulation` on a seed derived from (scenario seed,
    point index), so results are reproducible and independent of `workers`.
    Rows come back in point order.
    """
    if not 1 <= len(sweep) <= 2:
        raise ValueError("sweep must name one or two parameters")
    names = [name for name, _ in sweep]
    if len(set(names)) != len(names):
        raise ValueError("sweep parameters must be distinct")
    for name, values in sweep:
        if name not in SWEEPABLE:
            raise ValueError(f"unknown sweep parameter {name!r}, expected one of {SWEEPABLE}")
        if not values:
            raise ValueError(f"sweep parameter {name!r} has no values")

    assignments = [{names[0]: v} for v in sweep[0][1]]
    if len(sweep) == 2:
        assignments = [dict(a, **{names[1]: v}) for a in assignments for v in sweep[1][1]]
    tasks = [(sc, names, a, i) for i, a in enumerate(assignments)]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_point, tasks))
    else:
        rows = [_run_point(t) for t in tasks]
    return rows


# ---- config files ------------------------------------------------------


def scenario_to_dict(sc: Scenario) -> dict:
    d = {}
    for f in fields(Scenario):
        v = getattr(sc, f.name)
        if f.name == "users":
            v = [
                {
                    "role": u.role,
                    "false_alarm": _plain(u.false_alarm),
                    "miss": _plain(u.miss),
                    "sensed_channels": u.sensed_channels,
                }
                for u in v
            ]
        else:
            v = _plain(v)
        d[f.name] = v
    return d


def _plain(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, (np.integer, np.floating)):
        return v.item()
    return v


def scenario_from_dict(d: dict) -> Scenario:
    """Build a Scenario from parsed JSON, rejecting unknown keys."""
    if not isinstance(d, dict):
        raise ValueError("config must be a JSON object")
    known = {f.name for f in fields(Scenario)}
    extra = set(d) - known - {"sweep", "workers"}
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    kwargs = {k: v for k, v in d.items() if k in known}
    if "users" in kwargs:
        specs = []
        for i, u in enumerate(kwargs["users"]):
            if not isinstance(u, dict):
                raise ValueError(f"users[{i}] must be an object")
            bad = set(u) - {"role", "false_alarm", "miss", "sensed_channels"}
            if bad:
                raise ValueError(f"users[{i}] has unknown keys: {sorted(bad)}")
            u = {k: tuple(v) if isinstance(v, list) else v for k, v in u.items()}
            specs.append(UserSpec(**u))
        kwargs["users"] = tuple(specs)
    for key in ("rate_on", "rate_off"):
        if isinstance(kwargs.get(key), list):
            kwargs[key] = tuple(kwargs[key])
    return Scenario(**kwargs)


def sweep_from_dict(d: dict) -> list[tuple[str, list]]:
    """Parse the "sweep" config entry: a list of {"param", "values"}."""
    raw = d.get("sweep")
    if raw is None:
        raise ValueError('experiment config needs a "sweep" entry')
    if isinstance(raw, dict):
        raw = [raw]
    out = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or set(entry) != {"param", "values"}:
            raise ValueError(f'sweep[{i}] must be {{"param": ..., "values": [...]}}')
        out.append((entry["param"], list(entry["values"])))
    return out


def config_hash(d: dict) -> str:
    """Stable digest of a config dict for output provenance."""
    blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
