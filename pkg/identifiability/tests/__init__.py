import os
from pathlib import Path

from identifiability.compartments import validate_model
from identifiability.modelfile import parse_model_file

DATA = Path(__file__).resolve().parent.parent / "data"

# COMPID_EXHAUSTIVE=1 runs the sweeps and random samples at full size
EXHAUSTIVE = bool(os.environ.get("COMPID_EXHAUSTIVE"))


def fixture_model(name: str):
    for suffix in (".json", ".yaml"):
        path = DATA / f"{name}{suffix}"
        if path.exists():
            return parse_model_file(path)
    msg = f"no fixture model named {name}"
    raise FileNotFoundError(msg)


def build(n, edges, inputs, outputs, leaks=()):
    return validate_model(
        {
            "compartments": n,
            "edges": sorted([s, t] for s, t in edges),
            "inputs": sorted(inputs),
            "outputs": sorted(outputs),
            "leaks": sorted(leaks),
        }
    )


def random_digraph_model(rng, n):
    """Any digraph on n compartments, one input, one or two outputs."""
    pairs = [(s, t) for s in range(1, n + 1) for t in range(1, n + 1) if s != t]
    edges = rng.sample(pairs, rng.randint(0, len(pairs)))
    outputs = rng.sample(range(1, n + 1), rng.randint(1, min(2, n)))
    leaks = [c for c in range(1, n + 1) if rng.random() < 0.4]
    return build(n, edges, [rng.randint(1, n)], outputs, leaks)


def strongly_connected_edges(rng, n, density=0.3):
    """A random Hamiltonian cycle plus extra edges; n >= 2."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = {(order[k], order[(k + 1) % n]) for k in range(n)}
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            if s != t and rng.random() < density:
                edges.add((s, t))
    return edges


def block_chain_edges(rng, blocks):
    """Strongly connected blocks joined by forward edges only."""
    edges = set()
    for block in blocks:
        if len(block) > 1:
            edges |= {(block[k], block[(k + 1) % len(block)]) for k in range(len(block))}
    for first, second in zip(blocks, blocks[1:]):
        edges.add((rng.choice(first), rng.choice(second)))
    for i, earlier in enumerate(blocks):
        for later in blocks[i + 1 :]:
            for s in earlier:
                for t in later:
                    if rng.random() < 0.2:
                        edges.add((s, t))
    return edges
