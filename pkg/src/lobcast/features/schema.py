"""Layout of the 144-entry handcrafted feature vector.

One vector describes one event block. Groups, in column order:

  u1 raw book      40  per level: ask price, ask volume, bid price, bid volume
  u2 level gaps    20  ten per-level spreads, then ten per-level mid-prices
  u3 price ladder  20  side ranges plus absolute steps between adjacent levels
  u4 side means     4  mean ask/bid price, mean ask/bid volume
  u5 accumulated    2  summed price spread, summed volume imbalance
  u6 deltas        40  first difference of u1 against the previous block
  u7 intensities    6  short-window average events per block, one per kind
  u8 relative      10  short-vs-long indicators per kind, four kind ratios
  u9 acceleration   2  first difference of submit and trade intensity

Intensity windows are measured in blocks: SHORT_WINDOW and LONG_WINDOW
trailing blocks including the current one. A block only has a full
feature vector once the long window and the previous-block delta are
both available, i.e. from block index FIRST_VALID_BLOCK onward.
"""

from ..book.events import EVENT_KINDS

N_FEATURES = 144

U1 = slice(0, 40)
U2 = slice(40, 60)
U3 = slice(60, 80)
U4 = slice(80, 84)
U5 = slice(84, 86)
U6 = slice(86, 126)
U7 = slice(126, 132)
U8 = slice(132, 142)
U9 = slice(142, 144)

SHORT_WINDOW = 10
LONG_WINDOW = 50
FIRST_VALID_BLOCK = LONG_WINDOW - 1

_KIND_WORDS = {
    "S": "submit", "C": "cancel", "D": "delete",
    "EV": "exec_visible", "EH": "exec_hidden", "T": "trade",
}


def _build_names():
    names = []
    for i in range(1, 11):
        names += [f"ask_price_{i}", f"ask_volume_{i}", f"bid_price_{i}", f"bid_volume_{i}"]
    names += [f"spread_{i}" for i in range(1, 11)]
    names += [f"level_mid_{i}" for i in range(1, 11)]
    names += ["ask_price_range", "bid_price_range"]
    names += [f"ask_price_step_{i}" for i in range(1, 10)]
    names += [f"bid_price_step_{i}" for i in range(1, 10)]
    names += ["mean_ask_price", "mean_bid_price", "mean_ask_volume", "mean_bid_volume"]
    names += ["acc_price_spread", "acc_volume_imbalance"]
    names += [f"d_{n}" for n in names[:40]]
    names += [f"intensity_{_KIND_WORDS[k]}" for k in EVENT_KINDS]
    names += [f"intensity_up_{_KIND_WORDS[k]}" for k in EVENT_KINDS]
    names += ["ratio_trade_submit", "ratio_cancel_submit",
              "ratio_delete_submit", "ratio_hidden_visible"]
    names += ["accel_submit", "accel_trade"]
    return tuple(names)


FEATURE_NAMES = _build_names()
assert len(FEATURE_NAMES) == N_FEATURES
