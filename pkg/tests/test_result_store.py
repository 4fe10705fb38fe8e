"""Tests for the Redis mirror, against a mocked client."""
import json
from unittest.mock import MagicMock, patch

import redis

from result_store import KEY_PREFIX, ResultStore


class TestConnect:
    def test_connects_and_pings(self):
        client = MagicMock()
        with patch("result_store.redis.from_url", return_value=client) as from_url:
            store = ResultStore.connect("redis://localhost:6379", "abc")
        from_url.assert_called_once_with("redis://localhost:6379", decode_responses=False)
        client.ping.assert_called_once()
        assert store.run_id == "abc"

    def test_unreachable_server(self):
        client = MagicMock()
        client.ping.side_effect = redis.ConnectionError("refused")
        with patch("result_store.redis.from_url", return_value=client):
            assert ResultStore.connect("redis://localhost:6379", "abc") is None


class TestSaveRun:
    def test_keys(self, tmp_path):
        artifact = tmp_path / "blocks.csv"
        artifact.write_bytes(b"stage,block\n")
        client = MagicMock()
        client.hkeys.return_value = [b"blocks.csv"]
        store = ResultStore(client, "abc")
        summary = {"exit_status": 0, "config": {"system": {"name": "P0"}}}

        assert store.save_run(summary, [artifact])

        client.delete.assert_called_once_with(f"{KEY_PREFIX}:abc:summary", f"{KEY_PREFIX}:abc:artifacts")
        client.set.assert_called_once_with(f"{KEY_PREFIX}:abc:summary", json.dumps(summary, sort_keys=True))
        client.hset.assert_any_call(f"{KEY_PREFIX}:abc:artifacts", "blocks.csv", b"stage,block\n")
        entry = json.loads(client.hset.call_args_list[-1].args[2])
        assert entry == {"status": "pass", "exit_status": 0, "system": "P0"}

    def test_failed_run_is_indexed_as_fail(self):
        client = MagicMock()
        client.hkeys.return_value = []
        ResultStore(client, "abc").save_run({"exit_status": 1}, [])
        key, run, entry = client.hset.call_args.args
        assert (key, run) == (KEY_PREFIX, "abc")
        assert json.loads(entry)["status"] == "fail"

    def test_redis_error(self):
        client = MagicMock()
        client.set.side_effect = redis.RedisError("read only replica")
        assert not ResultStore(client, "abc").save_run({"exit_status": 0}, [])


class TestLoad:
    def test_load_summary(self):
        client = MagicMock()
        client.get.return_value = b'{"exit_status": 0}'
        assert ResultStore(client, "abc").load_summary() == {"exit_status": 0}
        client.get.assert_called_once_with(f"{KEY_PREFIX}:abc:summary")

    def test_missing_summary(self):
        client = MagicMock()
        client.get.return_value = None
        assert ResultStore(client, "abc").load_summary() is None

    def test_list_runs(self):
        client = MagicMock()
        client.hgetall.return_value = {b"abc": b'{"status": "pass"}', "def": '{"status": "fail"}'}
        runs = ResultStore(client, "abc").list_runs()
        assert runs == {"abc": {"status": "pass"}, "def": {"status": "fail"}}
