"""Loading schedules: per-step volumic forces, tractions, temperature; HRSCHED I/O.

A schedule describes one cycle as a strictly increasing sequence of step times
(the implicit cycle start is t = 0 with zero loading and the initial virgin
state); ``cycles`` repeats it periodically. Volumic forces are either a
constant vector or a centrifugal field rho * omega^2 * r_perp around a given
axis; tractions are constant vectors per Neumann facet tag; the temperature is
a uniform scalar or a nodal field.
"""

import numpy as np

from .errors import ValidationError


class ConstantForce:
    """Spatially constant volumic force (force per unit volume)."""

    kind = "constant"

    def __init__(self, vector):
        self.vector = np.asarray(vector, dtype=float).reshape(3)

    def evaluate(self, points):
        return np.broadcast_to(self.vector, (points.shape[0], 3)).copy()

    def spec_tokens(self):
        return ["constant"] + [f"{v:.17g}" for v in self.vector]


class RotationForce:
    """Centrifugal force rho * omega^2 * r_perp about an axis through a point."""

    kind = "rotation"

    def __init__(self, omega, axis, origin, density):
        self.omega = float(omega)
        axis = np.asarray(axis, dtype=float).reshape(3)
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise ValidationError("rotation axis must be nonzero")
        self.axis = axis / norm
        self.origin = np.asarray(origin, dtype=float).reshape(3)
        self.density = float(density)

    def evaluate(self, points):
        r = points - self.origin
        r_perp = r - np.outer(r @ self.axis, self.axis)
        return self.density * self.omega**2 * r_perp

    def spec_tokens(self):
        return (
            ["rotation", f"{self.omega:.17g}"]
            + [f"{v:.17g}" for v in self.axis]
            + [f"{v:.17g}" for v in self.origin]
            + [f"{self.density:.17g}"]
        )


class ScheduleStep:
    """Loading data of one step: time, volumic force, tractions, temperature."""

    def __init__(self, time, volumic=None, tractions=None, temperature=20.0):
        self.time = float(time)
        self.volumic = volumic
        self.tractions = dict(tractions or {})
        self.temperature = temperature    # scalar or (n_nodes,) array

    def temperature_at_points(self, mesh, ips):
        from .fe import interpolate_nodal
        if np.isscalar(self.temperature):
            return np.full(ips.n_points, float(self.temperature))
        return interpolate_nodal(mesh, ips, self.temperature)


class LoadingSchedule:
    """One loading cycle (strictly increasing step times) repeated ``cycles`` times."""

    def __init__(self, steps, cycles=1):
        self.steps = list(steps)
        self.cycles = int(cycles)
        times = [s.time for s in self.steps]
        if not times:
            raise ValidationError("a schedule needs at least one step")
        if times[0] <= 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("step times must be strictly increasing and positive")

    @property
    def n_steps(self):
        return len(self.steps)

    @property
    def period(self):
        return self.steps[-1].time

    def dt(self, j):
        """Time increment of step j (0-based) within a cycle."""
        return self.steps[j].time - (self.steps[j - 1].time if j else 0.0)

    def absolute_time(self, cycle, j):
        """Absolute time of step j in cycle ``cycle`` (both 0-based)."""
        return cycle * self.period + self.steps[j].time


# -- HRSCHED v1 -----------------------------------------------------------------

def save_schedule(schedule, path):
    """Write a schedule in the ASCII HRSCHED v1 format.

    Nodal temperature fields are written as HRARR files next to the schedule.
    """
    from pathlib import Path

    from .snapshots import write_array

    path = Path(path)
    lines = ["HRSCHED 1", f"cycles {schedule.cycles}"]
    for j, step in enumerate(schedule.steps, start=1):
        lines.append(f"step {j} {step.time:.17g}")
        if step.volumic is not None:
            lines.append("volumic " + " ".join(step.volumic.spec_tokens()))
        for tag, vec in sorted(step.tractions.items()):
            lines.append(f"traction {tag} " + " ".join(f"{v:.17g}" for v in np.asarray(vec)))
        if np.isscalar(step.temperature):
            lines.append(f"temperature scalar {float(step.temperature):.17g}")
        else:
            name = f"{path.name}.T{j:04d}.hra"
            write_array(np.asarray(step.temperature, dtype=float), path.parent / name)
            lines.append(f"temperature file {name}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")


def load_schedule(path):
    """Read an HRSCHED v1 file (inverse of :func:`save_schedule`)."""
    from pathlib import Path

    from .snapshots import read_array

    path = Path(path)
    lines = []
    with open(path, encoding="ascii") as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    if not lines or lines[0].split() != ["HRSCHED", "1"]:
        raise ValidationError(f"{path}: missing 'HRSCHED 1' header")
    cycles = 1
    steps = []
    current = None
    for line in lines[1:]:
        tok = line.split()
        key = tok[0]
        if key == "cycles":
            cycles = int(tok[1])
        elif key == "step":
            if len(tok) != 3:
                raise ValidationError(f"{path}: malformed step line '{line}'")
            current = ScheduleStep(float(tok[2]))
            steps.append(current)
        elif current is None:
            raise ValidationError(f"{path}: directive before any step: '{line}'")
        elif key == "volumic":
            if tok[1] == "constant":
                current.volumic = ConstantForce([float(v) for v in tok[2:5]])
            elif tok[1] == "rotation":
                vals = [float(v) for v in tok[2:10]]
                current.volumic = RotationForce(vals[0], vals[1:4], vals[4:7], vals[7])
            else:
                raise ValidationError(f"{path}: unknown volumic force kind '{tok[1]}'")
        elif key == "traction":
            current.tractions[int(tok[1])] = np.array([float(v) for v in tok[2:5]])
        elif key == "temperature":
            if tok[1] == "scalar":
                current.temperature = float(tok[2])
            elif tok[1] == "file":
                current.temperature = read_array(path.parent / tok[2])
            else:
                raise ValidationError(f"{path}: unknown temperature kind '{tok[1]}'")
        else:
            raise ValidationError(f"{path}: unknown directive '{key}'")
    return LoadingSchedule(steps, cycles)
