"""Declaring priorities and comparing reward vectors.

A priority graph says which objectives outrank which others.  This
walk-through builds two small graphs and shows how the same pair of
reward vectors can be ordered, indifferent, or incomparable depending
on the shape of the hierarchy.
"""

from preorder_rl.preorder import build_graph
from preorder_rl.relations import ActionRelation, oracle_survivors, relate

# A strict chain: objective 0 (say, safety) outranks 1 (progress),
# which outranks 2 (comfort).
chain = build_graph(3, [(0, 1), (1, 2)])
print("chain edges:", sorted(chain.edges))
print("topological order:", chain.topological_sort())

# Under a chain, any gain on a higher objective settles the comparison,
# no matter how large the loss below it.
a = (1.0, -5.0, -5.0)
b = (0.0, 9.0, 9.0)
print("\nchain verdicts")
print("  a vs b:", relate(chain, a, b).name)
print("  b vs a:", relate(chain, b, a).name)

# A fork: 0 outranks both 1 and 2, but 1 and 2 are mutually unordered.
fork = build_graph(3, [(0, 1), (0, 2)])

# Opposing improvements on the unordered pair cannot be traded off.
x = (0.0, 1.0, 0.0)
y = (0.0, 0.0, 1.0)
print("\nfork verdicts")
print("  x vs y:", relate(fork, x, y).name)
print("  equal vectors:", relate(fork, x, x).name)

# The exact filter walks the graph top-down: each objective inherits the
# verdicts of its parents and only compares pairs they left undecided.
rewards = [
    (1.0, 0.0, 0.0),   # safe but slow
    (1.0, 1.0, 0.0),   # safe and fast: dominates the first
    (0.0, 5.0, 5.0),   # unsafe: filtered by the top objective
]
survivors = oracle_survivors(fork, rewards)
print("\nper-objective survivors")
for objective in range(3):
    print(f"  objective {objective} keeps {sorted(survivors[objective])}")
assert relate(fork, rewards[1], rewards[0]) is ActionRelation.DOMINATES
