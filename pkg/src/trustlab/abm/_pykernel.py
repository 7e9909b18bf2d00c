"""Pure-Python world loop; the reference the compiled kernel must match bit for bit."""

from __future__ import annotations

from .world import (
    BiasIndicator,
    FeedbackEstimate,
    PartnerSelection,
    bias_update,
    clustering_rows,
    estimated_feedback,
    perceive_from_noise,
    pick_partner,
    social_update,
    trust_update,
)


def simulate(
    priors, noise, groups, trust, signals, truth_A, z, u_select, u_feedback,
    alpha, slope, p_feedback, trust_proportional, discounting, confidence_mode,
    continuous, bias_start,
    out_clustering, out_m1, out_m2, out_acc_pre, out_acc_post, out_trust2,
):
    """Run the world in place on ``priors`` and ``trust``; returns the fallback count."""
    n = len(priors)
    T = len(signals)
    prior = priors.tolist()
    sigma = noise.tolist()
    group = [int(g) for g in groups]
    rows = trust.tolist()
    mode = PartnerSelection.TRUST_PROPORTIONAL if trust_proportional else PartnerSelection.RANDOM
    fmode = FeedbackEstimate.AGREEMENT_IN_CONFIDENCE if confidence_mode else FeedbackEstimate.AGREEMENT
    imode = BiasIndicator.CONTINUOUS if continuous else BiasIndicator.DISCRETE
    n1 = group.count(0)
    n2 = n - n1
    fallbacks = 0
    p = [0.0] * n
    conf = [0.0] * n
    choice = [False] * n

    for t in range(T):
        s = float(signals[t])
        truth = bool(truth_A[t])
        zt = z[t].tolist()
        ut = u_select[t].tolist()
        ft = u_feedback[t].tolist()
        correct_pre = 0
        for i in range(n):
            p[i], conf[i] = perceive_from_noise(prior[i], sigma[i], s, zt[i], slope)
            choice[i] = p[i] >= 0.5
            if choice[i] == truth:
                correct_pre += 1
        correct_post = 0
        update_bias = bias_start >= 0 and t >= bias_start
        for i in range(n):
            row = rows[i]
            j, fb = pick_partner(row, i, mode, ut[i])
            if fb:
                fallbacks += 1
            theta = row[j]
            phat = social_update(p[i], p[j], theta, discounting)
            if (phat >= 0.5) == truth:
                correct_post += 1
            has_feedback = ft[i] < p_feedback
            if has_feedback:
                F = 1.0 if choice[j] == truth else 0.0
            else:
                F = estimated_feedback(choice[i] == choice[j], conf[i], fmode)
            row[j] = trust_update(theta, F, alpha)
            if update_bias:
                prior[i] = bias_update(prior[i], phat, has_feedback, truth, imode, alpha)

        out_clustering[t] = clustering_rows(rows, group)
        s1 = s2 = 0.0
        for i in range(n):
            if group[i] == 0:
                s1 += prior[i]
            else:
                s2 += prior[i]
        out_m1[t] = s1 / n1
        out_m2[t] = s2 / n2
        out_acc_pre[t] = correct_pre / n
        out_acc_post[t] = correct_post / n
        tsum = 0.0
        tcount = 0
        for i in range(n):
            row = rows[i]
            for j in range(n):
                if j != i and group[j] == 1:
                    tsum += row[j]
                    tcount += 1
        out_trust2[t] = tsum / tcount

    priors[:] = prior
    trust[:, :] = rows
    return fallbacks
