import math
from typing import List

import numpy as np

from app.core.exceptions import InvalidInputError


def parse_range(text: str) -> List[float]:
    """`start:stop:step` (stop included), `log:start:stop:count`, `a,b,c` or a single number."""
    text = text.strip()
    try:
        if text.startswith("log:"):
            start, stop, count = text[4:].split(":")
            start_f, stop_f, n = float(start), float(stop), int(count)
            if start_f <= 0 or stop_f <= 0 or n < 1:
                raise InvalidInputError(f"log range needs positive bounds and count >= 1: '{text}'")
            if n == 1:
                return [start_f]
            return [float(v) for v in np.logspace(math.log10(start_f), math.log10(stop_f), n)]
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise InvalidInputError(f"range needs step > 0 and stop >= start: '{text}'")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 12) for k in range(count)]
        values = [float(part) for part in text.split(",") if part.strip()]
        if not values:
            raise InvalidInputError("empty range")
        return values
    except InvalidInputError:
        raise
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse range '{text}'") from exc
