"""Straight transcription of the unbounded Guided IG pseudocode.

Runs F(x1, x2) = x1 * x2 from baseline (0, 0) to input (1, 2) with T=2,
p=0.5 and prints every inner-loop move as JSON. The lower p-quantile is
taken over the features that have not reached the input, ties included.
"""
import json
import math

INF = math.inf


def grad(x):
    return [x[1], x[0]]


def lower_quantile(values, p):
    v = sorted(values)
    return v[int(math.floor(p * (len(v) - 1)))]


def run(xb, xi, T, p):
    d_total = sum(abs(b - i) for b, i in zip(xb, xi))
    x = list(xb)
    attr = [0.0] * len(x)
    moves = []
    for t in range(1, T + 1):
        y = grad(x)
        g = list(y)
        while True:
            y = [INF if x[i] == xi[i] else y[i] for i in range(len(x))]
            d_target = d_total * (1 - t / T)
            d_current = sum(abs(a - b) for a, b in zip(x, xi))
            if d_current <= d_target:
                break
            finite = [abs(v) for v in y if v != INF]
            q = lower_quantile(finite, p)
            S = [i for i in range(len(x)) if y[i] != INF and abs(y[i]) <= q]
            d_s = sum(abs(x[i] - xi[i]) for i in S)
            delta = (d_current - d_target) / d_s
            temp = list(x)
            for i in S:
                x[i] = xi[i] if delta > 1 else (1 - delta) * x[i] + delta * xi[i]
            zeroed = [i for i in range(len(y)) if y[i] == INF]
            y = [0.0 if v == INF else v for v in y]
            inc = [0.0] * len(x)
            for i in S:
                inc[i] = (x[i] - temp[i]) * y[i]
                attr[i] += inc[i]
            moves.append({
                "t": t,
                "d_target": d_target,
                "d_current": d_current,
                "selected": S,
                "delta": delta,
                "clamped": delta > 1,
                "zeroed_sentinels": zeroed,
                "gradient": g,
                "x_before": temp,
                "x_after": list(x),
                "increment": inc,
            })
            if delta <= 1:
                break
    return {"baseline": xb, "input": xi, "steps": T, "fraction": p,
            "moves": moves, "attributions": attr}


if __name__ == "__main__":
    print(json.dumps(run([0.0, 0.0], [1.0, 2.0], 2, 0.5), indent=2))
