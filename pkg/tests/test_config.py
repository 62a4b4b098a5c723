"""Tests for toolkit settings."""

import pytest
from pydantic import ValidationError

from zero_coref.core.config import Settings, parse_buckets


@pytest.mark.unit
class TestParseBuckets:
    """Test bucket threshold parsing."""

    def test_string(self):
        """Test comma-separated thresholds."""
        assert parse_buckets("0,1,2,4,8") == (0, 1, 2, 4, 8)
        assert parse_buckets("0, 3, 10,") == (0, 3, 10)

    def test_sequence(self):
        """Test list input."""
        assert parse_buckets([0, 2]) == (0, 2)

    @pytest.mark.parametrize("value", ["", "1,2", "0,2,2", "0,3,1", "0,a"])
    def test_invalid(self, value):
        """Test empty, non-zero-based, non-increasing and non-numeric thresholds."""
        with pytest.raises(ValueError):
            parse_buckets(value)


@pytest.mark.unit
class TestSettings:
    """Test Settings defaults and environment overrides."""

    def test_defaults(self):
        """Test the documented defaults."""
        config = Settings(_env_file=None)
        assert config.distance_buckets == (0, 1, 2, 4, 8)
        assert config.cluster_representation == "last"
        assert config.azp_hit_mode == "entity"
        assert config.include_pro_in_coref is True
        assert config.pro_marker == "*pro*"
        assert config.pro_pos == "PRON"

    def test_environment_override(self, monkeypatch):
        """Test ZERO_COREF_ variables override defaults."""
        monkeypatch.setenv("ZERO_COREF_DISTANCE_BUCKETS", "0,2,5")
        monkeypatch.setenv("ZERO_COREF_AZP_HIT_MODE", "position")
        monkeypatch.setenv("ZERO_COREF_SEED", "7")
        config = Settings(_env_file=None)
        assert config.distance_buckets == (0, 2, 5)
        assert config.azp_hit_mode == "position"
        assert config.seed == 7

    @pytest.mark.parametrize(
        "field,value",
        [
            ("column_layout", "tabs"),
            ("cluster_representation", "middle"),
            ("azp_hit_mode", "token"),
            ("distance_buckets", "1,2"),
        ],
    )
    def test_invalid_values(self, field, value):
        """Test restricted fields reject unknown values."""
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: value})
