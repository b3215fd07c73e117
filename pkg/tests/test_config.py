import subprocess
import sys
from pathlib import Path

import pytest

from expdiv.config import SearchConfig, SumRunConfig, from_dict, to_dict

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def test_sum_config_defaults_and_round_trip():
    cfg = SumRunConfig()
    assert cfg.checkpoints[-1] == 10**7
    assert from_dict(SumRunConfig, to_dict(cfg)) == cfg


@pytest.mark.parametrize("bad", [{"checkpoints": []}, {"checkpoints": [10, 10]}, {"shard": 0}, {"bogus": 1}])
def test_sum_config_rejects(bad):
    with pytest.raises((ValueError, TypeError)):
        from_dict(SumRunConfig, bad)


def test_search_config_rejects():
    with pytest.raises(ValueError):
        SearchConfig(m=1)


def test_scripts_run(tmp_path):
    cfg = tmp_path / "r.json"
    cfg.write_text('{"checkpoints": [1000, 3000, 10000, 30000]}')
    for argv in (
        ["run_sums.py", "--function", "E2tau", "--config", str(cfg)],
        ["theta_search.py", "--m", "8", "--max-len", "6"],
        ["exponent_table.py", "--max-m", "1", "--max-k", "2"],
    ):
        r = subprocess.run([sys.executable, str(SCRIPTS / argv[0]), *argv[1:]], capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
