"""Analytic FLOP counts: DeiT-T at 224px and the DeiT-T / CA-DeiT-T ratio across resolutions."""

import argparse

from circulant_attention.costmodel import CA_DEIT_T, DEIT_T, attention_flops, model_flops, tokens_for_resolution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolutions", default="224,384,512,768,1024,1536")
    ap.add_argument("--patch", type=int, default=16)
    args = ap.parse_args()

    print(f"{'res':>5} {'N':>6} {'DeiT-T GFLOPs':>14} {'CA-DeiT-T GFLOPs':>17} {'ratio':>7} {'attn SA/CA (d=64)':>18}")
    for res in (int(r) for r in args.resolutions.split(",")):
        N = tokens_for_resolution(res, args.patch)
        sa, ca = model_flops(DEIT_T, N), model_flops(CA_DEIT_T, N)
        layer = attention_flops(N, 64)
        print(f"{res:>5} {N:>6} {sa / 1e9:>14.3f} {ca / 1e9:>17.3f} {sa / ca:>7.3f} "
              f"{layer.flops_sa / layer.flops_ca:>18.2f}")


if __name__ == "__main__":
    main()
