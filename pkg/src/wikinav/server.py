"""HTTP service for human play: the same games the automated agents get.

The server derives its goal set from the identical master seed the
benchmark uses, so the human plays the exact tasks in the report. Players
see titles only (current, goal, neighbors), matching the information
available to the title-embedding strategies. Completed games are appended
to a JSON-lines results log under strategy name "human"; abandoned
sessions record nothing.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .benchmark import sample_goals
from .graph import LinkGraph, NodeId
from .strategies import NavigationState


@dataclass
class GameSession:
    session_id: str
    state: NavigationState
    goal_index: Optional[int]
    hop_cap: int
    created_at: str
    finished: bool = False
    success: bool = False
    dead_end: bool = False
    recorded: bool = False


class NewGameRequest(BaseModel):
    goal_index: Optional[int] = None
    goal_id: Optional[int] = None


class MoveRequest(BaseModel):
    next: int


def create_app(
    graph: LinkGraph,
    *,
    start: NodeId,
    master_seed: int = 42,
    game_count: int = 10,
    hop_cap: int = 5000,
    results_log: Optional[str | Path] = None,
    static_dir: Optional[str | Path] = None,
) -> FastAPI:
    goals = sample_goals(graph, start, game_count, master_seed)
    app = FastAPI(title="wikinav play service")
    sessions: dict[str, GameSession] = {}
    lock = threading.RLock()

    app.state.goals = goals
    app.state.start = int(start)
    app.state.hop_cap = hop_cap

    def node_info(v: int) -> dict:
        return {"id": v, "title": graph.title(v)}

    def write_result(session: GameSession) -> None:
        if session.recorded or results_log is None:
            return
        session.recorded = True
        entry = {
            "strategy": "human",
            "game_index": session.goal_index if session.goal_index is not None else -1,
            "goal_id": session.state.goal,
            "goal_title": graph.title(session.state.goal),
            "success": session.success,
            "hops": session.state.hops if session.success else session.hop_cap,
            "dead_end": session.dead_end,
            "path": list(session.state.path),
            "finished_at": datetime.now(timezone.utc).isoformat(),
        }
        with open(results_log, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, sort_keys=True) + "\n")

    def settle(session: GameSession) -> None:
        """Apply the engine's finish rules to the session in place."""
        state = session.state
        if state.current == state.goal:
            session.finished = True
            session.success = True
        elif state.hops >= session.hop_cap:
            session.finished = True
        elif graph.out_degree(state.current) == 0:
            session.finished = True
            session.dead_end = True
        if session.finished:
            write_result(session)

    def state_payload(session: GameSession) -> dict:
        state = session.state
        neighbors = [node_info(int(w)) for w in graph.out_neighbors(state.current)]
        neighbors.sort(key=lambda d: (d["title"], d["id"]))  # presentation order only
        return {
            "session_id": session.session_id,
            "current": node_info(state.current),
            "goal": node_info(state.goal),
            "hops": state.hops,
            "hop_cap": session.hop_cap,
            "neighbors": neighbors,
            "visited_ids": sorted(state.visited),
            "finished": session.finished,
            "success": session.success,
        }

    def get_session(session_id: str) -> GameSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/api/game/new")
    def new_game(req: NewGameRequest) -> dict:
        with lock:
            if req.goal_id is not None:
                if not 0 <= req.goal_id < graph.node_count:
                    raise HTTPException(status_code=400, detail="goal id out of range")
                goal = int(req.goal_id)
                goal_index = None
            else:
                if not goals:
                    raise HTTPException(status_code=409, detail="goal set not initialized")
                index = req.goal_index if req.goal_index is not None else 0
                if not 0 <= index < len(goals):
                    raise HTTPException(status_code=400, detail="goal index out of range")
                goal = goals[index]
                goal_index = index
            session = GameSession(
                session_id=uuid.uuid4().hex,
                state=NavigationState.initial(int(start), goal),
                goal_index=goal_index,
                hop_cap=hop_cap,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            settle(session)  # start == goal finishes immediately
            sessions[session.session_id] = session
            return {
                "session_id": session.session_id,
                "start": node_info(int(start)),
                "goal": node_info(goal),
                "hop_cap": hop_cap,
            }

    @app.get("/api/game/{session_id}")
    def game_state(session_id: str) -> dict:
        with lock:
            return state_payload(get_session(session_id))

    @app.post("/api/game/{session_id}/move")
    def move(session_id: str, req: MoveRequest) -> dict:
        with lock:
            session = get_session(session_id)
            if session.finished:
                raise HTTPException(status_code=409, detail="game already finished")
            neighbors = {int(w) for w in graph.out_neighbors(session.state.current)}
            if req.next not in neighbors:
                raise HTTPException(status_code=422, detail="not a neighbor of the current node")
            session.state.advance(req.next)
            settle(session)
            return state_payload(session)

    @app.delete("/api/game/{session_id}", status_code=204)
    def abandon(session_id: str) -> None:
        with lock:
            get_session(session_id)
            del sessions[session_id]

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
