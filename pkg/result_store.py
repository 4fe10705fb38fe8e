"""Optional Redis mirror of run summaries and exported tables."""
import json
import logging
from pathlib import Path
from typing import Any, Optional

import redis

logger = logging.getLogger(__name__)

KEY_PREFIX = "bd-nets:Runs"


class ResultStore:
    """Stores one run under `bd-nets:Runs:<run id>`.

    Keys:
        bd-nets:Runs                    hash run id -> {"status", "exit_status", "system"}
        bd-nets:Runs:<id>:summary       the summary document as JSON
        bd-nets:Runs:<id>:artifacts     hash artifact file name -> file content
    """

    def __init__(self, client: redis.Redis, run_id: str):
        self.client = client
        self.run_id = run_id

    @classmethod
    def connect(cls, redis_url: str, run_id: str) -> Optional["ResultStore"]:
        """Connect and ping; None when Redis is unreachable, so the run goes on without the mirror."""
        logger.info("Connecting to Redis result store...")
        try:
            client = redis.from_url(redis_url, decode_responses=False)
            client.ping()
        except Exception as e:
            logger.warning(f"⚠ Redis unavailable ({e}), continuing without the result store")
            return None
        logger.info("✓ Connected to Redis successfully")
        return cls(client, run_id)

    def key(self, suffix: str) -> str:
        return f"{KEY_PREFIX}:{self.run_id}:{suffix}"

    def save_run(self, summary: dict[str, Any], artifacts: list[Path]) -> bool:
        """Replace whatever was stored for this run id. Returns False on a Redis error."""
        try:
            self.client.delete(self.key("summary"), self.key("artifacts"))
            self.client.set(self.key("summary"), json.dumps(summary, sort_keys=True))
            for path in artifacts:
                self.client.hset(self.key("artifacts"), path.name, path.read_bytes())
            status = "fail" if summary.get("exit_status") else "pass"
            entry = {
                "status": status,
                "exit_status": summary.get("exit_status"),
                "system": summary.get("config", {}).get("system", {}).get("name"),
            }
            self.client.hset(KEY_PREFIX, self.run_id, json.dumps(entry, sort_keys=True))
            stored = self.client.hkeys(self.key("artifacts"))
            logger.info(f"✓ Mirrored run {self.run_id} to Redis with {len(stored)} artifacts")
            return True
        except redis.RedisError as e:
            logger.error(f"Redis error while storing run {self.run_id}: {e}")
            return False

    def load_summary(self) -> Optional[dict[str, Any]]:
        raw = self.client.get(self.key("summary"))
        if raw is None:
            return None
        return json.loads(raw.decode("utf-8") if isinstance(raw, bytes) else raw)

    def list_runs(self) -> dict[str, dict[str, Any]]:
        runs = {}
        for run, entry in self.client.hgetall(KEY_PREFIX).items():
            run = run.decode("utf-8") if isinstance(run, bytes) else run
            runs[run] = json.loads(entry.decode("utf-8") if isinstance(entry, bytes) else entry)
        return runs
