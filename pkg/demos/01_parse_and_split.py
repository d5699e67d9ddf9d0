"""Parse an instance, build the task graph, and split a tour into trips.

A routing instance lives in a small text format: a node count, the list of
required edges (each with a traversal cost and a demand to collect), the
list of edges that can only be deadheaded, a depot, and a vehicle capacity.
This script walks the whole deterministic pipeline on a five-node example:
text -> Instance -> TaskGraph -> chromosome -> optimal trip decomposition.
"""

import numpy as np

import scarp

DAT = """NOMBRE : demo5
COMENTARIO : five nodes, four required edges
VERTICES : 5
ARISTAS_REQ : 4
ARISTAS_NOREQ : 2
LISTA_ARISTAS_REQ :
  (1,2) coste 5 demanda 2
  (2,3) coste 4 demanda 3
  (3,4) coste 6 demanda 2
  (4,5) coste 3 demanda 1
LISTA_ARISTAS_NOREQ :
  (5,1) coste 2
  (2,4) coste 1
DEPOSITO : 1
CAPACIDAD : 5
"""

# ---------------------------------------------------------------------------
# Parse and validate. The Instance is a plain record of what the file said.
# ---------------------------------------------------------------------------
inst = scarp.parse_instance(DAT)
scarp.validate_instance(inst)
print(f"instance {inst.name}: {inst.node_count} nodes, "
      f"{len(inst.required_edges)} required edges, capacity {inst.capacity}")

# The task graph turns each required edge into two directed tasks (one per
# traversal direction) and prices every depot/task-to-task deadhead with
# shortest paths. Arc 0 is the depot itself.
graph = scarp.build_task_graph(inst)
print(f"task arcs: {graph.dist.shape[0] - 1} (+ depot arc 0)")
print("deadhead distances from the depot:", np.array2string(graph.dist[0, 1:], precision=1))

# ---------------------------------------------------------------------------
# A chromosome is a giant sequence: every required edge once, in some order
# and direction. Split finds the cheapest way to cut it into capacity-legal
# trips - the chromosome never encodes trip boundaries itself.
# ---------------------------------------------------------------------------
chrom = np.array([1, 3, 5, 7], dtype=np.int32)  # all four edges, forward
sol = scarp.split(chrom, graph)
print(f"\nsplit of {chrom.tolist()}: total cost {sol.h}, "
      f"longest trip {sol.m}, {sol.t} trips")
for i, trip in enumerate(sol.trips, 1):
    print(f"  trip {i}: tasks {list(trip.tasks)} load {trip.load} cost {trip.cost}")

# A worse task order pays for itself: the same edges visited inside-out.
worse = np.array([5, 1, 7, 3], dtype=np.int32)
sol_worse = scarp.split(worse, graph)
print(f"split of {worse.tolist()}: total cost {sol_worse.h} ({sol_worse.t} trips)")

# ---------------------------------------------------------------------------
# Splitting under a tighter capacity (planning slack) without touching the
# instance: more trips, higher planned cost, but more room for demand noise.
# ---------------------------------------------------------------------------
tight = scarp.split(chrom, graph, capacity=3.0)
print(f"\nsame order, planning capacity 3.0: cost {tight.h}, {tight.t} trips")
print("trip loads:", [t.load for t in tight.trips])
