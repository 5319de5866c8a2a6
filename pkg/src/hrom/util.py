"""Timing and subdomain map-reduce helpers.

The distributed execution of the original workflow is emulated in-process:
per-subdomain work is a map (optionally threaded), followed by a single
additive reduction. Results are only required to be reduction-order
insensitive to ~1e-13 relative, not bitwise.
"""

import time
from concurrent.futures import ThreadPoolExecutor


def map_subdomains(fn, items, threads=1):
    """Apply ``fn`` to every item, optionally on a thread pool.

    Order of the returned list always matches ``items`` so that reductions
    are deterministic for a fixed thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class Timer:
    """Context manager measuring wall time in seconds (``timer.elapsed``)."""

    def __enter__(self):
        self._t0 = time.perf_counter()
        self.elapsed = 0.0
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._t0
        return False


def append_stage(workdir, stage, seconds, detail=""):
    """Append one wall-time entry to the stage manifest of a working directory."""
    path = workdir / "stages.txt"
    with open(path, "a", encoding="ascii") as f:
        f.write(f"{stage} {seconds:.6f} {detail}\n".rstrip() + "\n")


def read_stages(workdir):
    """Read the stage manifest as a list of (stage, seconds, detail) tuples."""
    path = workdir / "stages.txt"
    entries = []
    if not path.exists():
        return entries
    for line in open(path, encoding="ascii"):
        parts = line.split(maxsplit=2)
        if len(parts) >= 2:
            entries.append((parts[0], float(parts[1]), parts[2].strip() if len(parts) > 2 else ""))
    return entries
