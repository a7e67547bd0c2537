"""How a node's trust score moves as validations arrive.

Run: python3 demos/01_trust_scores.py
"""

from trustchain.trust import (
    BetaPrior,
    DecayParams,
    TrustState,
    ValidationRecord,
    apply_validation,
    current_trust,
    trust_from_history,
)

prior = BetaPrior(0.5, 0.5)
print(f"A newcomer starts at the prior mean: {prior.mean:.3f}")

# Eight good validations, then the node turns bad for eight rounds.
history = [ValidationRecord(t, t < 8) for t in range(16)]

print("\nround  plain   decayed(0.8)  ema(0.7)")
plain = TrustState.fresh(prior)
ema_params = DecayParams(mode="ema", lam=0.7)
ema = TrustState.fresh(prior, ema_params)
for rec in history:
    plain = apply_validation(plain, rec, DecayParams())
    ema = apply_validation(ema, rec, ema_params)
    decayed = trust_from_history(history[: rec.round + 1], prior, lam=0.8, now=rec.round)
    print(f"{rec.round:5d}  {current_trust(plain, DecayParams()):.3f}   {decayed:.3f}         "
          f"{current_trust(ema, ema_params):.3f}")

print("\nWithout decay the score remembers the good start forever. Both decay")
print("modes let recent misbehaviour dominate, the EMA more sharply.")

# A low-confidence mistake costs less than a confident one.
state = TrustState(n_correct=10, m_incorrect=0)
for conf in (1.0, 0.25):
    after = apply_validation(state, ValidationRecord(11, False, conf), DecayParams())
    print(f"one wrong verdict at confidence {conf}: trust {current_trust(state, DecayParams()):.3f}"
          f" -> {current_trust(after, DecayParams()):.3f}")
