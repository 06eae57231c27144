"""Session service: HTTP endpoints and the stdio message loop.

Both speak the same wire format: a request is a verb plus payload, a
response carries the state view and the events the operation raised.
The store serializes operations per session; distinct sessions are
independent.
"""

from __future__ import annotations

import json
import sys
import threading
from dataclasses import dataclass, field
from typing import Any, IO

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from .defaults import SizePolicy
from .preference import PreferenceConfig, build_structure
from .protocol import (
    Participant,
    ProtocolError,
    SessionConfig,
    SessionState,
    apply_command,
    open_session,
    open_session_records,
    save_transcript,
    session_theory,
    state_view,
    submit_move,
)


@dataclass
class SessionEntry:
    state: SessionState
    records: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory sessions, one serialized command stream each."""

    def __init__(self) -> None:
        self._sessions: dict[str, SessionEntry] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, config: SessionConfig, seed_theory: str | None = None) -> tuple[str, SessionEntry, list[dict]]:
        state, events, records = open_session_records(config, seed_theory=seed_theory)
        entry = SessionEntry(state=state, records=records)
        with self._lock:
            self._counter += 1
            session_id = f"s{self._counter}"
            self._sessions[session_id] = entry
        return session_id, entry, events

    def get(self, session_id: str) -> SessionEntry:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise KeyError(f"unknown session {session_id!r}") from None


def config_from_request(data: dict[str, Any]) -> SessionConfig:
    participants = tuple(
        Participant(p["id"], p.get("name", p["id"]), p.get("role", "participant"))
        for p in data.get("participants", ())
    )
    policy = data.get("size_policy") or {}
    return SessionConfig(
        participants=participants,
        atoms=tuple(data.get("atoms", ())),
        elements=tuple(data.get("elements", ())),
        size_policy=SizePolicy(
            tau_most=policy.get("tau_most", 0.7),
            tau_small=policy.get("tau_small", 0.3),
            eps_very_small=policy.get("eps_very_small", 0.05),
        ),
        preference_variant=data.get("preference_variant", "subset"),
        unit_cap=data.get("unit_cap", 16),
    )


def hierarchy_view(state: SessionState) -> dict[str, Any]:
    """Cells, direct-successor edges and packets for the console.

    Extensional or default-free sessions yield empty lists: there is
    no hierarchy to draw yet.
    """
    if state.config.extensional:
        return {"cells": [], "hasse": [], "packets": [], "packet_pairs": []}
    theory = session_theory(state)
    if not theory.defaults:
        return {"cells": [], "hasse": [], "packets": [], "packet_pairs": []}
    structure = build_structure(
        theory, PreferenceConfig(variant=state.config.preference_variant)
    )
    cells = [
        {
            "code": c.code,
            "expression": c.expression(structure.family),
            "size": len(c.carrier),
            "valid": sorted(structure.partitions[c.code].valid_ids),
        }
        for c in structure.cells
    ]
    packets = [
        {"cell": code, "kind": kind, "size": len(ms)}
        for (code, kind), ms in sorted(structure.order.packet_members.items())
    ]
    return {
        "cells": cells,
        "hasse": [[x, y] for x, y in sorted(structure.hierarchy.hasse)],
        "packets": packets,
        "packet_pairs": [
            [f"{a[1]}({a[0]})", f"{b[1]}({b[0]})"]
            for a, b in sorted(structure.order.base_pairs)
        ],
    }


def handle_request(entry: SessionEntry, request: dict[str, Any]) -> dict[str, Any]:
    """Apply one wire request to a session, recording it for replay."""
    verb = request.get("verb")
    with entry.lock:
        if verb == "move":
            state, events = submit_move(
                entry.state,
                author=request["author"],
                kind=request["kind"],
                payload=request.get("payload", {}),
                based_on=request.get("based_on", ()),
            )
            entry.state = state
            entry.records.append(
                {"op": "move", "move": state.moves[-1].to_json(), "events": events}
            )
        elif verb == "command":
            state, events = apply_command(
                entry.state, request["name"], **request.get("args", {})
            )
            entry.state = state
            entry.records.append(
                {
                    "op": "command",
                    "name": request["name"],
                    "args": request.get("args", {}),
                    "events": events,
                }
            )
        elif verb == "state":
            events = []
        else:
            raise ProtocolError(f"unknown verb {verb!r}")
        return {"ok": True, "events": events, "state": state_view(entry.state)}


def create_app(store: SessionStore | None = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="defarg session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.post("/session")
    def create_session(body: dict):
        try:
            config = config_from_request(body)
            session_id, entry, events = store.create(
                config, seed_theory=body.get("seed_theory")
            )
        except (ProtocolError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "session_id": session_id,
            "events": events,
            "state": state_view(entry.state),
        }

    def _entry(session_id: str) -> SessionEntry:
        try:
            return store.get(session_id)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/session/{session_id}/move")
    def post_move(session_id: str, body: dict):
        entry = _entry(session_id)
        request = dict(body)
        request.setdefault("verb", "move")
        try:
            return handle_request(entry, request)
        except (ProtocolError, KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/session/{session_id}/state")
    def get_state(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            return {"state": state_view(entry.state)}

    @app.get("/session/{session_id}/hierarchy")
    def get_hierarchy(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            try:
                return hierarchy_view(entry.state)
            except (ProtocolError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/session/{session_id}/transcript", response_class=PlainTextResponse)
    def get_transcript(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            return save_transcript(entry.state, entry.records)

    return app


def run_stdio(
    config: SessionConfig,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    seed_theory: str | None = None,
) -> SessionEntry:
    """Newline-delimited message loop over one session.

    Each input line is a JSON request; each output line a JSON
    response (state view plus events, or an error).
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    state, events = open_session(config, seed_theory=seed_theory)
    entry = SessionEntry(state=state)
    stdout.write(
        json.dumps(
            {"ok": True, "events": events, "state": state_view(entry.state)},
            sort_keys=True,
        )
        + "\n"
    )
    stdout.flush()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        if line in ("quit", "exit"):
            break
        try:
            request = json.loads(line)
            response = handle_request(entry, request)
        except (ProtocolError, ValueError, KeyError) as exc:
            response = {"ok": False, "error": str(exc)}
        stdout.write(json.dumps(response, sort_keys=True) + "\n")
        stdout.flush()
    return entry
