"""Counter-based toss streams."""

import pytest

from coinfactory.bitsource import GOLDEN, MASK64, BitSource, mix64, stream_state


class TestMix:
    def test_zero_is_fixed(self):
        assert mix64(0) == 0

    def test_stays_in_64_bits(self):
        for z in (1, GOLDEN, MASK64, 2**63):
            assert 0 <= mix64(z) <= MASK64

    def test_nearby_inputs_scatter(self):
        a, b = mix64(1), mix64(2)
        assert bin(a ^ b).count("1") > 16

    def test_stream_states_differ_across_trials(self):
        states = {stream_state(7, t) for t in range(1000)}
        assert len(states) == 1000

    def test_stream_states_differ_across_seeds(self):
        assert stream_state(1, 0) != stream_state(2, 0)


class TestBitSource:
    def test_replay_is_identical(self):
        a = BitSource(seed=3, bias=0.4, trial=5)
        b = BitSource(seed=3, bias=0.4, trial=5)
        assert [a.uniform() for _ in range(100)] == [
            b.uniform() for _ in range(100)
        ]

    def test_uniform_range_and_grain(self):
        src = BitSource(seed=1, bias=0.5)
        for _ in range(1000):
            u = src.uniform()
            assert 0.0 <= u < 1.0
            assert u == int(u * 2**53) / 2**53  # exactly 53 bits

    def test_uniform_mean(self):
        src = BitSource(seed=8, bias=0.5)
        mean = sum(src.uniform() for _ in range(20000)) / 20000
        assert abs(mean - 0.5) < 0.01

    def test_bit_rate_tracks_bias(self):
        src = BitSource(seed=4, bias=0.2)
        rate = sum(src.next_bit() for _ in range(20000)) / 20000
        assert abs(rate - 0.2) < 0.01

    def test_bits_are_uniform_threshold(self):
        a = BitSource(seed=6, bias=0.3)
        b = BitSource(seed=6, bias=0.3)
        for _ in range(200):
            assert a.next_bit() == (b.uniform() < 0.3)

    def test_consumed_counts_every_draw(self):
        src = BitSource(seed=0, bias=0.5)
        src.uniform()
        src.next_bit()
        assert src.consumed == 2

    def test_rejects_degenerate_bias(self):
        for bias in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                BitSource(seed=0, bias=bias)

    def test_trials_are_distinct_streams(self):
        a = [BitSource(seed=5, bias=0.5, trial=0).uniform() for _ in range(1)]
        b = [BitSource(seed=5, bias=0.5, trial=1).uniform() for _ in range(1)]
        assert a != b
