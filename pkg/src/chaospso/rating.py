"""Elo and Glicko-2 tournament ratings of sequence sources."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

ELO_START = 2000.0
ELO_K = 8.0
GLICKO_START = 1500.0
GLICKO_RD = 350.0
GLICKO_SIGMA = 0.06
GLICKO_TAU = 0.5
GLICKO_SCALE = 173.7178
GLICKO_EPS = 1e-6
GLICKO_MAX_ITER = 100
DRAW_EPS = 0.01
BLOCK_SIZE = 50


class GameOutcome(str, Enum):
    WIN_A = "win_a"
    DRAW = "draw"
    WIN_B = "win_b"

    @property
    def score_a(self):
        return {"win_a": 1.0, "draw": 0.5, "win_b": 0.0}[self.value]


@dataclass(frozen=True)
class GameRecord:
    player_a: str
    player_b: str
    function_id: int
    block_index: int
    outcome: GameOutcome


@dataclass(frozen=True)
class RatingState:
    elo: float = ELO_START
    glicko_r: float = GLICKO_START
    glicko_rd: float = GLICKO_RD
    glicko_sigma: float = GLICKO_SIGMA


class ConvergenceError(RuntimeError):
    pass


def block_means(errors, block_size=BLOCK_SIZE):
    """Mean distance error of consecutive run blocks (the game scores)."""
    errors = np.asarray(errors, dtype=np.float64)
    if block_size < 1 or errors.size % block_size:
        raise ValueError(f"{errors.size} runs are not divisible into blocks of {block_size}")
    return errors.reshape(-1, block_size).mean(axis=1)


def partition_games(samples_a, samples_b, block_size=BLOCK_SIZE):
    """Pair block g of player A with block g of player B: list of (mde_a, mde_b)."""
    ma, mb = block_means(samples_a, block_size), block_means(samples_b, block_size)
    if ma.size != mb.size:
        raise ValueError("players have different run counts")
    return list(zip(ma.tolist(), mb.tolist()))


def game_outcome(mde_a, mde_b, eps=DRAW_EPS, mode="absolute"):
    gap = abs(mde_a - mde_b)
    if mode == "relative":
        limit = eps * max(abs(mde_a), abs(mde_b))
    elif mode == "absolute":
        limit = eps
    else:
        raise ValueError(f"unknown draw mode: {mode}")
    if gap <= limit:
        return GameOutcome.DRAW
    return GameOutcome.WIN_A if mde_a < mde_b else GameOutcome.WIN_B


def elo_expected(ra, rb):
    return 1.0 / (1.0 + 10.0 ** ((rb - ra) / 400.0))


def elo_update(ra, rb, outcome, k=ELO_K):
    s = GameOutcome(outcome).score_a
    ea = elo_expected(ra, rb)
    eb = elo_expected(rb, ra)
    return ra + k * (s - ea), rb + k * ((1.0 - s) - eb)


def _g(phi):
    return 1.0 / math.sqrt(1.0 + 3.0 * phi * phi / (math.pi * math.pi))


def glicko2_period_update(player, games, tau=GLICKO_TAU):
    """One Glicko-2 rating period for ``player``.

    ``games`` is a list of (opponent RatingState, score in {0, 0.5, 1}).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    phi = player.glicko_rd / GLICKO_SCALE
    sigma = player.glicko_sigma
    if not games:
        rd = min(math.sqrt(phi * phi + sigma * sigma) * GLICKO_SCALE, GLICKO_RD)
        return replace(player, glicko_rd=rd)
    mu = (player.glicko_r - GLICKO_START) / GLICKO_SCALE
    inv_v_terms, delta_terms = [], []
    for opp, score in games:
        mu_j = (opp.glicko_r - GLICKO_START) / GLICKO_SCALE
        g = _g(opp.glicko_rd / GLICKO_SCALE)
        e = 1.0 / (1.0 + math.exp(-g * (mu - mu_j)))
        inv_v_terms.append(g * g * e * (1.0 - e))
        delta_terms.append(g * (score - e))
    # exact sums keep the update independent of game order
    v = 1.0 / math.fsum(inv_v_terms)
    improvement = math.fsum(delta_terms)
    delta = v * improvement

    a = math.log(sigma * sigma)
    phi2 = phi * phi
    d2 = delta * delta

    def f(x):
        ex = math.exp(x)
        return ex * (d2 - phi2 - v - ex) / (2.0 * (phi2 + v + ex) ** 2) - (x - a) / (tau * tau)

    lo = a
    if d2 > phi2 + v:
        hi = math.log(d2 - phi2 - v)
    else:
        k = 1
        while f(a - k * tau) < 0.0:
            k += 1
            if k > GLICKO_MAX_ITER:
                raise ConvergenceError("volatility bracket not found")
        hi = a - k * tau
    f_lo, f_hi = f(lo), f(hi)
    it = 0
    while abs(hi - lo) > GLICKO_EPS:
        it += 1
        if it > GLICKO_MAX_ITER:
            raise ConvergenceError("volatility iteration did not converge in 100 steps")
        c = lo + (lo - hi) * f_lo / (f_hi - f_lo)
        f_c = f(c)
        if f_c * f_hi <= 0.0:
            lo, f_lo = hi, f_hi
        else:
            f_lo /= 2.0
        hi, f_hi = c, f_c
    new_sigma = math.exp(lo / 2.0)
    phi_star = math.sqrt(phi2 + new_sigma * new_sigma)
    new_phi = 1.0 / math.sqrt(1.0 / (phi_star * phi_star) + 1.0 / v)
    new_mu = mu + new_phi * new_phi * improvement
    return replace(player,
                   glicko_r=GLICKO_SCALE * new_mu + GLICKO_START,
                   glicko_rd=min(GLICKO_SCALE * new_phi, GLICKO_RD),
                   glicko_sigma=new_sigma)


def _period(states, games, k, tau):
    """Elo sequentially over ``games``, then one simultaneous Glicko-2 update."""
    elo = {p: s.elo for p, s in states.items()}
    for gm in games:
        elo[gm.player_a], elo[gm.player_b] = elo_update(elo[gm.player_a], elo[gm.player_b], gm.outcome, k)
    per_player = {p: [] for p in states}
    for gm in games:
        s = gm.outcome.score_a
        per_player[gm.player_a].append((states[gm.player_b], s))
        per_player[gm.player_b].append((states[gm.player_a], 1.0 - s))
    out = {}
    for p, s in states.items():
        upd = glicko2_period_update(s, per_player[p], tau)
        out[p] = replace(upd, elo=elo[p])
    return out


@dataclass(frozen=True)
class TournamentResult:
    final: dict  # player -> RatingState
    elo_ci: dict  # player -> (lo, hi)
    glicko_ci: dict  # player -> (lo, hi)
    games: list


def schedule_games(samples, players, function_ids, block_size=BLOCK_SIZE, eps=DRAW_EPS,
                   draw_mode="absolute"):
    """All games in canonical order: block, then player pair, then function.

    ``samples[(player, function_id)]`` holds distance errors in run order.
    """
    gaps = [(p, f) for p in players for f in function_ids if (p, f) not in samples]
    if gaps:
        raise ValueError(f"missing results for {gaps}")
    means = {key: block_means(samples[key], block_size) for key in
             ((p, f) for p in players for f in function_ids)}
    n_blocks = {m.size for m in means.values()}
    if len(n_blocks) != 1:
        raise ValueError("players have different run counts")
    games = []
    for g in range(n_blocks.pop()):
        for i, pa in enumerate(players):
            for pb in players[i + 1:]:
                for f in function_ids:
                    out = game_outcome(means[(pa, f)][g], means[(pb, f)][g], eps, draw_mode)
                    games.append(GameRecord(pa, pb, f, g, out))
    return games


def rate(players, games, k=ELO_K, tau=GLICKO_TAU):
    """Process games one period per block index; returns {player: RatingState}."""
    states = {p: RatingState() for p in players}
    by_block = {}
    for gm in games:
        by_block.setdefault(gm.block_index, []).append(gm)
    for g in sorted(by_block):
        states = _period(states, by_block[g], k, tau)
    return states


def run_tournament(samples, players, function_ids, block_size=BLOCK_SIZE, eps=DRAW_EPS,
                   k=ELO_K, tau=GLICKO_TAU, draw_mode="absolute"):
    """Full tournament plus 95% intervals from per-block re-ratings."""
    players = list(players)
    games = schedule_games(samples, players, function_ids, block_size, eps, draw_mode)
    final = rate(players, games, k, tau)
    by_block = {}
    for gm in games:
        by_block.setdefault(gm.block_index, []).append(gm)
    per_block = [rate(players, by_block[g], k, tau) for g in sorted(by_block)]
    elo_ci, glicko_ci = {}, {}
    for p in players:
        e = np.array([r[p].elo for r in per_block])
        q = np.array([r[p].glicko_r for r in per_block])
        elo_ci[p] = tuple(float(v) for v in np.percentile(e, [2.5, 97.5]))
        glicko_ci[p] = tuple(float(v) for v in np.percentile(q, [2.5, 97.5]))
    return TournamentResult(final, elo_ci, glicko_ci, games)
