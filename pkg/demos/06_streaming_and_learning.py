"""Streaming constructions and one-shot threshold learning.

The wild construction grows a single pool where every item is equally
likely to feed new items; the exponential construction decays old items'
weights by e^-alpha per step.  Both converge to the threshold behavior,
though only linearly.  Finally, a threshold can be learned from a single
example string: each new item copies its block type from a random example
bit and wires itself at random.
"""
import numpy as np

from amptree import (StreamConfig, evaluate_learned, learn_threshold,
                     linear_threshold, phase_progress_report, simulate_stream)
from amptree.rng import generator

lt = linear_threshold(0.5)

# wild: inputs at 0.39, pool grown to 256x its size
bits = (1,) * 25 + (0,) * 39
cfg = StreamConfig(n=64, k=16320, alpha=0.0, seed=5, trials=300,
                   input_bits=bits)
trace = simulate_stream(lt, cfg)
print("wild construction, weighted firing probability by pool doubling:")
report = phase_progress_report(trace, 0.5)
for row in report.rows:
    print(f"  pool {64 + row.step_start:6d} -> {64 + row.step_end:6d}: "
          f"X {row.mean_start:.4f} -> {row.mean_end:.4f} "
          f"(expected <= {row.expected_bound:.4f})")
rate = 1.0 - trace.final_bits.mean()
print(f"final-item correctness over {cfg.trials} trials: {rate:.3f}")

# exponential: same threshold, alpha = 0.002
cfg_e = StreamConfig(n=600, k=8000, alpha=0.002, seed=5, trials=300,
                     input_bits=(1,) * 240 + (0,) * 360)
trace_e = simulate_stream(lt, cfg_e)
print(f"\nexponential (alpha=0.002): final X = "
      f"{trace_e.x[:, -1].mean():.5f}, final-item correctness = "
      f"{1.0 - trace_e.final_bits.mean():.3f}")

# one-shot learning from a single example with half its bits on
n, m, levels = 200, 5000, 30
x = np.zeros(n, dtype=np.uint8)
x[:100] = 1
generator(1).shuffle(x)
learned = learn_threshold(levels, m, x, seed=2)
print(f"\nlearned structure: {levels} levels x {m} items, "
      f"block mix {learned.block_fraction():.3f} (target 0.5)")
for ones in (80, 90, 110, 120):
    probe = np.zeros(n, dtype=np.uint8)
    probe[:ones] = 1
    generator(ones).shuffle(probe)
    frac = evaluate_learned(learned, probe)
    print(f"  input fraction {ones / n:.2f}: top-level firing {frac:.4f}")
