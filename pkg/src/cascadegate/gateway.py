"""Live HTTP gateway applying the margin cascade in front of two upstreams.

Every request goes to the small upstream with top-k log-probabilities
requested for the first generated token (temperature 0). The first-token
margin is compared against the dynamic threshold; below it, the large
upstream is consulted and its answer returned. The decision state (read
threshold, record margin, update counters) is a single short critical
section serialized by a lock; upstream calls happen outside it, and warm-up
membership is arrival order at that critical section.

The decision log keeps the exact post-exponentiation top-two probabilities,
so an offline replay of the logged score sequence through the policy module
reproduces the decision sequence bit for bit.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import httpx
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from cascadegate.errors import ConfigError, UpstreamError
from cascadegate.policy import DEFAULT_WARMUP, DynamicThreshold
from cascadegate.records import ReplayRecord, validate_record

SMALL_KEY_ENV = "CASCADEGATE_SMALL_KEY"
LARGE_KEY_ENV = "CASCADEGATE_LARGE_KEY"


@dataclass(frozen=True, slots=True)
class UpstreamConfig:
    small_endpoint: str
    large_endpoint: str
    small_model: str = "small"
    large_model: str = "large"
    timeout: float = 30.0
    retries: int = 1
    logprob_top_k: int = 5
    max_tokens: int = 16

    def __post_init__(self) -> None:
        if self.small_endpoint == self.large_endpoint:
            raise ConfigError("small and large endpoints must be distinct")
        if self.timeout <= 0.0:
            raise ConfigError(f"timeout must be > 0, got {self.timeout!r}")
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries!r}")
        if self.logprob_top_k < 2:
            raise ConfigError(f"logprob_top_k must be >= 2, got {self.logprob_top_k!r}")


@dataclass(frozen=True, slots=True)
class GatewayConfig:
    upstream: UpstreamConfig
    escalation_probability: float = 0.2
    warmup_target: int = DEFAULT_WARMUP
    cost_small: float = 1.0
    cost_large: float = 10.0
    fallback_to_small: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.escalation_probability <= 1.0:
            raise ConfigError("escalation_probability must be in [0, 1]")
        if not 0.0 < self.cost_small < self.cost_large:
            raise ConfigError("costs must satisfy 0 < cost_small < cost_large")


def load_config(path: str | Path) -> GatewayConfig:
    with open(path, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    try:
        upstream = UpstreamConfig(
            small_endpoint=raw["small_endpoint"],
            large_endpoint=raw["large_endpoint"],
            small_model=raw.get("small_model", "small"),
            large_model=raw.get("large_model", "large"),
            timeout=float(raw.get("timeout", 30.0)),
            retries=int(raw.get("retries", 1)),
            logprob_top_k=int(raw.get("logprob_top_k", 5)),
            max_tokens=int(raw.get("max_tokens", 16)),
        )
        return GatewayConfig(
            upstream=upstream,
            escalation_probability=float(raw.get("escalation_probability", 0.2)),
            warmup_target=int(raw.get("warmup_target", DEFAULT_WARMUP)),
            cost_small=float(raw.get("cost_small", 1.0)),
            cost_large=float(raw.get("cost_large", 10.0)),
            fallback_to_small=bool(raw.get("fallback_to_small", False)),
        )
    except KeyError as exc:
        raise ConfigError(f"gateway config missing key: {exc.args[0]!r}") from exc


@dataclass(frozen=True, slots=True)
class GatewayDecision:
    index: int
    top_probs: tuple[float, ...]
    margin: float
    threshold: float | None
    warmup: bool
    called_large: bool


@dataclass
class GatewayState:
    config: GatewayConfig
    lock: threading.Lock = field(default_factory=threading.Lock)
    requests: int = 0
    escalations: int = 0
    total_cost: float = 0.0
    decision_log: list[GatewayDecision] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.threshold = DynamicThreshold(
            p=self.config.escalation_probability,
            warmup_target=self.config.warmup_target,
        )

    def record_decision(self, top_probs: Sequence[float]) -> GatewayDecision:
        """The decision critical section. Cost is committed optimistically
        with the decision so stats snapshots stay consistent; a failed large
        call credits it back."""
        margin = top_probs[0] - (top_probs[1] if len(top_probs) > 1 else 0.0)
        with self.lock:
            warmup = self.threshold.warming_up
            current = self.threshold.current_threshold
            called_large = (not warmup) and margin < current
            self.threshold.observe(margin)
            self.requests += 1
            cost = self.config.cost_small
            if called_large:
                self.escalations += 1
                cost += self.config.cost_large
            self.total_cost += cost
            entry = GatewayDecision(
                index=self.requests,
                top_probs=tuple(top_probs[:2]),
                margin=margin,
                threshold=current,
                warmup=warmup,
                called_large=called_large,
            )
            self.decision_log.append(entry)
            return entry

    def credit_large_cost(self) -> None:
        with self.lock:
            self.total_cost -= self.config.cost_large

    def snapshot(self) -> dict[str, Any]:
        with self.lock:
            requests = self.requests
            return {
                "requests": requests,
                "escalation_rate": self.escalations / requests if requests else 0.0,
                "realized_avg_cost": self.total_cost / requests if requests else 0.0,
                "current_threshold": self.threshold.current_threshold,
            }


def _auth_headers(env_name: str) -> dict[str, str]:
    key = os.environ.get(env_name)
    if key:
        return {"Authorization": f"Bearer {key}"}
    return {}


def _call_completions(
    client: httpx.Client,
    endpoint: str,
    model: str,
    prompt: str,
    max_tokens: int,
    retries: int,
    key_env: str,
    logprobs: int | None = None,
) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "model": model,
        "prompt": prompt,
        "max_tokens": max_tokens,
        "temperature": 0,
    }
    if logprobs is not None:
        payload["logprobs"] = logprobs
    url = f"{endpoint.rstrip('/')}/v1/completions"
    last_error = "unknown error"
    for _ in range(retries + 1):
        try:
            response = client.post(url, json=payload, headers=_auth_headers(key_env))
        except httpx.HTTPError as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            continue
        if response.status_code >= 500:
            last_error = f"upstream returned {response.status_code}"
            continue
        if response.status_code >= 400:
            raise UpstreamError(
                f"upstream {url} rejected the request: {response.status_code}",
                status_code=502,
            )
        return response.json()
    raise UpstreamError(f"upstream {url} unreachable: {last_error}", status_code=502)


def _parse_small_response(body: dict[str, Any], top_k: int) -> tuple[str, list[float]]:
    """Extract answer text and top-k first-token probabilities.

    Log-probabilities are exponentiated (and clamped into [0, 1]) before the
    margin is computed, so the margin stays in [0, 1].
    """
    choices = body.get("choices")
    if not choices:
        raise UpstreamError("small upstream response has no choices", status_code=500)
    choice = choices[0]
    text = choice.get("text", "")
    logprobs = choice.get("logprobs") or {}
    top_logprobs = logprobs.get("top_logprobs")
    if not top_logprobs or not isinstance(top_logprobs[0], dict) or not top_logprobs[0]:
        raise UpstreamError(
            "small upstream did not return top_logprobs; the gateway requires "
            "first-token log-probabilities (logprobs capability)",
            status_code=500,
        )
    probs = sorted(
        (min(1.0, max(0.0, math.exp(float(lp)))) for lp in top_logprobs[0].values()),
        reverse=True,
    )
    return text, probs[:top_k]


def create_app(config: GatewayConfig, client: httpx.Client | None = None) -> FastAPI:
    app = FastAPI(title="cascadegate")
    state = GatewayState(config=config)
    http_client = client or httpx.Client(timeout=config.upstream.timeout)
    app.state.gateway = state
    app.state.client = http_client
    upstream = config.upstream

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/v1/stats")
    def stats() -> dict[str, Any]:
        return state.snapshot()

    @app.post("/v1/answer")
    def answer(body: dict[str, Any]) -> JSONResponse:
        prompt = body.get("prompt")
        if not isinstance(prompt, str) or not prompt:
            raise HTTPException(status_code=422, detail="body must carry a 'prompt' string")
        try:
            small_body = _call_completions(
                http_client,
                upstream.small_endpoint,
                upstream.small_model,
                prompt,
                upstream.max_tokens,
                upstream.retries,
                SMALL_KEY_ENV,
                logprobs=upstream.logprob_top_k,
            )
            small_text, top_probs = _parse_small_response(small_body, upstream.logprob_top_k)
        except UpstreamError as exc:
            raise HTTPException(status_code=exc.status_code, detail=str(exc)) from exc

        decision = state.record_decision(top_probs)
        final_text = small_text
        degraded = False
        if decision.called_large:
            try:
                large_body = _call_completions(
                    http_client,
                    upstream.large_endpoint,
                    upstream.large_model,
                    prompt,
                    upstream.max_tokens,
                    upstream.retries,
                    LARGE_KEY_ENV,
                )
                large_choices = large_body.get("choices") or [{}]
                final_text = large_choices[0].get("text", "")
            except UpstreamError as exc:
                state.credit_large_cost()
                if not config.fallback_to_small:
                    raise HTTPException(status_code=exc.status_code, detail=str(exc)) from exc
                degraded = True

        return JSONResponse(
            {
                "answer": final_text,
                "called_large": decision.called_large,
                "margin": decision.margin,
                "threshold": decision.threshold,
                "warmup": decision.warmup,
                "degraded": degraded,
            }
        )

    return app


def decision_log_to_records(
    log: Sequence[GatewayDecision], cost_small: float = 1.0, cost_large: float = 10.0
) -> list[ReplayRecord]:
    """Rebuild replay records from a gateway decision log.

    The logged top-two probabilities become the token distribution, so the
    offline margin equals the online one exactly; correctness fields are
    placeholders (the gateway never observes ground truth).
    """
    records = []
    for entry in log:
        pairs = [["k1", entry.top_probs[0]]]
        if len(entry.top_probs) > 1:
            pairs.append(["k2", entry.top_probs[1]])
        records.append(
            validate_record(
                {
                    "id": f"g{entry.index:06d}",
                    "task": "gateway",
                    "small_first_token": pairs,
                    "small_answer": "",
                    "small_correct": True,
                    "large_answer": "",
                    "large_correct": True,
                    "small_cost": cost_small,
                    "large_cost": cost_large,
                }
            )
        )
    return records
