"""Scheme verification by exhaustive or sampled state enumeration.

Two layers with independent failure modes:

  counting  for every read set, some version at or above the latest
            complete one must reach `denom` allocated symbols: the pure
            budget argument, no coded bytes involved.
  bitexact  random payloads are encoded through the real codec and decoded
            through every read set; the returned bytes must equal the
            original message of the returned version.

Worst-case cost is measured over every (state, server) pair as an exact
fraction of k_bits, so it can be compared against the scheme budget with
zero tolerance.
"""

from __future__ import annotations

import concurrent.futures
import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .allocation import (Allocation, Scheme, allocation_for, alpha_bits,
                         scheme_granularity, validate_regime)
from .codec import encode_all, quorum_decode
from .errors import (BudgetExceededError, CodecError, DecodeContractError,
                     InconsistentSymbolsError)
from .model import (Params, SystemState, latest_complete, random_state,
                    state_at, state_count, work_budget)

COUNTING = "counting"
BITEXACT = "bitexact"

_SEED_STRIDE = 1_000_003  # spreads per-state seeds; keeps sampling jobs-independent


@dataclass(frozen=True)
class VerifyMode:
    kind: str  # "exhaustive" | "sampled"
    count: int = 0
    seed: int = 0

    @classmethod
    def exhaustive(cls, seed: int = 0) -> "VerifyMode":
        return cls("exhaustive", 0, seed)

    @classmethod
    def sampled(cls, count: int, seed: int) -> "VerifyMode":
        return cls("sampled", count, seed)

    def to_dict(self) -> dict:
        if self.kind == "exhaustive":
            return {"kind": "exhaustive", "payload_seed": self.seed}
        return {"kind": "sampled", "count": self.count, "seed": self.seed}


@dataclass(frozen=True)
class Violation:
    state: str  # JSON form of the state
    read_set: tuple[int, ...] | None
    layer: str
    reason: str

    def to_dict(self) -> dict:
        return {"state": json.loads(self.state),
                "read_set": list(self.read_set) if self.read_set else None,
                "layer": self.layer, "reason": self.reason}


@dataclass
class VerifyReport:
    scheme: str
    params: dict
    mode: dict
    layers: tuple[str, ...]
    states_checked: int
    read_sets_per_state: int
    violations_total: int
    violations: list[Violation]
    worst_case_bits: Fraction
    alpha_bits: Fraction
    jobs: int
    elapsed_s: float = 0.0  # informational; excluded from the serialized report

    @property
    def passed(self) -> bool:
        return self.violations_total == 0

    @property
    def worst_equals_alpha(self) -> bool:
        return self.worst_case_bits == self.alpha_bits

    def to_dict(self) -> dict:
        def frac(x: Fraction) -> dict:
            return {"num": x.numerator, "den": x.denominator, "float": float(x)}
        return {
            "scheme": self.scheme,
            "params": self.params,
            "mode": self.mode,
            "layers": list(self.layers),
            "states_checked": self.states_checked,
            "read_sets_per_state": self.read_sets_per_state,
            "violations_total": self.violations_total,
            "violations": [v.to_dict() for v in self.violations],
            "worst_case_bits": frac(self.worst_case_bits),
            "alpha_bits": frac(self.alpha_bits),
            "worst_equals_alpha": self.worst_equals_alpha,
            "passed": self.passed,
            "jobs": self.jobs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def read_sets(p: Params) -> list[tuple[int, ...]]:
    return list(combinations(range(p.n), p.cr))


def check_state_counting(scheme: Scheme, S: SystemState, p: Params,
                         allocs: list[Allocation] | None = None) -> Violation | None:
    """First read set (if any) where no fresh-enough version reaches the
    symbol threshold. `allocs` may inject alternative allocations, which is
    how broken-scheme behavior is exercised."""
    if allocs is None:
        allocs = [allocation_for(scheme, S, i, p) for i in range(p.n)]
    denom = scheme_granularity(scheme, p).denom
    latest = latest_complete(S, p)
    if latest is None:
        return None
    for T in read_sets(p):
        trace = {}
        ok = False
        for m in range(p.nu, latest - 1, -1):
            total = sum(allocs[t].count(m) for t in T)
            trace[m] = total
            if total >= denom:
                ok = True
                break
        if not ok:
            return Violation(
                state=S.to_json(), read_set=T, layer=COUNTING,
                reason=f"no version >= {latest} reaches {denom} symbols; counts {trace}")
    return None


def random_payloads(p: Params, seed: int) -> dict[int, bytes]:
    if p.k_bits % 8 != 0:
        raise CodecError(f"the bit-exact layer needs byte-aligned K, got {p.k_bits}")
    rng = random.Random(seed)
    return {u: rng.getrandbits(p.k_bits).to_bytes(p.k_bits // 8, "big")
            for u in p.versions}


def bitexact_violations(scheme: Scheme, S: SystemState, stores, messages,
                        p: Params) -> Violation | None:
    """Decode through every read set and compare bytes against the original."""
    latest = latest_complete(S, p)
    for T in read_sets(p):
        try:
            result = quorum_decode(scheme, S, T, stores, p)
        except DecodeContractError as exc:
            return Violation(S.to_json(), T, BITEXACT, f"contract: {exc}")
        except InconsistentSymbolsError as exc:
            return Violation(S.to_json(), T, BITEXACT, f"inconsistent store: {exc}")
        if latest is None:
            if result is not None:
                return Violation(S.to_json(), T, BITEXACT,
                                 "expected NULL with no complete version")
            continue
        if result is None:
            return Violation(S.to_json(), T, BITEXACT,
                             "NULL returned despite a complete version")
        m, payload = result
        if m < latest:
            return Violation(S.to_json(), T, BITEXACT,
                             f"version {m} is older than the latest complete {latest}")
        if payload != messages[m]:
            return Violation(S.to_json(), T, BITEXACT,
                             f"payload mismatch for version {m}")
    return None


def check_state_bitexact(scheme: Scheme, S: SystemState, p: Params,
                         seed: int) -> Violation | None:
    messages = random_payloads(p, seed)
    stores = encode_all(scheme, S, messages, p)
    return bitexact_violations(scheme, S, stores, messages, p)


def _verify_range(scheme: Scheme, p: Params, mode: VerifyMode,
                  layers: tuple[str, ...], start: int, stop: int,
                  max_violations: int) -> dict:
    worst = Fraction(0)
    violations: list[Violation] = []
    total = 0
    k_bits = p.k_bits
    for idx in range(start, stop):
        if mode.kind == "exhaustive":
            S = state_at(p, idx)
            payload_seed = mode.seed * _SEED_STRIDE + idx
        else:
            S = random_state(p, mode.seed * _SEED_STRIDE + idx)
            payload_seed = (mode.seed + 1) * _SEED_STRIDE + idx
        allocs = [allocation_for(scheme, S, i, p) for i in range(p.n)]
        for alloc in allocs:
            worst = max(worst, alloc.bits(k_bits))
        found: list[Violation] = []
        if COUNTING in layers:
            v = check_state_counting(scheme, S, p, allocs)
            if v is not None:
                found.append(v)
        if BITEXACT in layers:
            v = check_state_bitexact(scheme, S, p, payload_seed)
            if v is not None:
                found.append(v)
        total += len(found)
        violations.extend(found[:max(0, max_violations - len(violations))])
    return {"worst": worst, "violations": violations, "violations_total": total,
            "states": stop - start}


def _range_worker(args) -> dict:
    return _verify_range(*args)


def verify(scheme: Scheme, p: Params, mode: VerifyMode,
           layers: tuple[str, ...] = (COUNTING, BITEXACT),
           jobs: int = 1, max_violations: int = 100,
           budget: int | None = None) -> VerifyReport:
    """Run the requested layers over all (or sampled) states.

    Deterministic for a fixed (scheme, params, mode, layers) regardless of
    jobs: sampled states are seeded per index, and partial results merge in
    range order.
    """
    validate_regime(scheme, p)
    for layer in layers:
        if layer not in (COUNTING, BITEXACT):
            raise ValueError(f"unknown layer {layer!r}")
    n_reads = len(read_sets(p))
    if mode.kind == "exhaustive":
        n_states = state_count(p)
    elif mode.kind == "sampled":
        n_states = mode.count
    else:
        raise ValueError(f"unknown mode {mode.kind!r}")
    if n_states * n_reads > work_budget(budget):
        raise BudgetExceededError(
            f"{n_states} states x {n_reads} read sets exceeds budget "
            f"{work_budget(budget)}; set MVCODE_BUDGET to override")

    started = time.monotonic()
    jobs = max(1, jobs)
    chunk = -(-n_states // jobs)
    ranges = [(lo, min(lo + chunk, n_states))
              for lo in range(0, n_states, chunk)] or [(0, 0)]
    arg_sets = [(scheme, p, mode, layers, lo, hi, max_violations)
                for lo, hi in ranges]
    if jobs == 1 or len(arg_sets) == 1:
        partials = [_range_worker(a) for a in arg_sets]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(_range_worker, arg_sets))

    worst = max((part["worst"] for part in partials), default=Fraction(0))
    violations: list[Violation] = []
    for part in partials:
        violations.extend(part["violations"])
    violations = violations[:max_violations]
    report = VerifyReport(
        scheme=scheme.value,
        params=p.to_dict(),
        mode=mode.to_dict(),
        layers=layers,
        states_checked=sum(part["states"] for part in partials),
        read_sets_per_state=n_reads,
        violations_total=sum(part["violations_total"] for part in partials),
        violations=violations,
        worst_case_bits=worst,
        alpha_bits=alpha_bits(scheme, p),
        jobs=jobs,
        elapsed_s=time.monotonic() - started,
    )
    return report
