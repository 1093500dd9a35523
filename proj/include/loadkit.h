/* loadkit — loadability analysis for AC power networks.
 *
 * C interface over the C++ core: opaque handles, status codes, and
 * JSON/CSV payloads in heap strings released with lk_string_free().
 * All handles are owned by the caller and released with the matching
 * *_free() function. Calls are reentrant; handles must not be shared
 * between threads without external synchronization while being mutated.
 */
#ifndef LOADKIT_H
#define LOADKIT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lk_network lk_network;
typedef struct lk_state lk_state;

typedef enum {
    LK_OK = 0,
    LK_ERR_INPUT = 2,       /* malformed case / schema / invariant violation */
    LK_ERR_SOLVER = 3,      /* power flow non-convergence or LP failure */
    LK_ERR_UNSUPPORTED = 4, /* feature rejected by strict modeling policy */
    LK_ERR_ARGUMENT = 5,    /* bad argument (unknown bus, bad grid spec, ...) */
    LK_ERR_INTERNAL = 9
} lk_status;

/* Message describing the most recent failure on this thread. */
const char* lk_last_error(void);

void lk_string_free(char* s);

/* ---- ingestion ---------------------------------------------------- */

/* MATPOWER .m subset; modeling policy applied with defaults
 * (PV->PQ via gen-table q, shunts/charging dropped, taps ignored). */
lk_status lk_network_from_matpower(const char* text, lk_network** out);

/* opts_json (nullable): {"strict": bool} — strict mode rejects shunts/taps. */
lk_status lk_network_from_matpower_opts(const char* text, const char* opts_json,
                                        lk_network** out);

/* Native JSON network schema (direct line admittances). */
lk_status lk_network_from_json(const char* text, lk_network** out);

lk_status lk_network_to_json(const lk_network* net, char** json_out);
void lk_network_free(lk_network* net);

int lk_network_bus_count(const lk_network* net);
/* JSON array of modeling warnings. */
lk_status lk_network_warnings(const lk_network* net, char** json_out);

/* ---- operating points --------------------------------------------- */

/* Damped Newton from the case voltages (or flat start).
 * opts_json (nullable): {"tol": f, "max_iter": i, "flat_start": bool} */
lk_status lk_solve(const lk_network* net, const char* opts_json, lk_state** out);

/* {"buses":[{"id","v_re","v_im"}]} */
lk_status lk_state_from_json(const lk_network* net, const char* text,
                             lk_state** out);
lk_status lk_state_to_json(const lk_network* net, const lk_state* st,
                           char** json_out);
void lk_state_free(lk_state* st);

/* ---- analyses ----------------------------------------------------- */

/* Loadability boundary membership at the given operating point.
 * opts_json (nullable): {"epsilon": f, "tol": f, "use_q_limits": bool,
 *   "q_limits": [{"bus": id, "qmin": f, "qmax": f}]}  (per-unit bounds on
 *   generator reactive output; overrides the case gen table).
 * Report: {"on_boundary", "alarm", "epsilon", "direction", "binding",
 *          "certificate"} */
lk_status lk_check_boundary(const lk_network* net, const lk_state* st,
                            const char* opts_json, char** report_json);

/* Loadability margin (cone projection). Same options minus epsilon.
 * Report: {"margin", "direction", "binding"} */
lk_status lk_margin(const lk_network* net, const lk_state* st,
                    const char* opts_json, char** report_json);

/* Boundary point for one growth direction z over the PQ buses (case order,
 * slack excluded). Report: {"z","p","buses","residual","degenerate",
 * "on_boundary"} */
lk_status lk_pareto_point(const lk_network* net, const double* z, int nz,
                          char** report_json);

/* Front sweep over `count` angular directions (2-load networks).
 * CSV: z_1..z_n, p_1..p_n, residual, on_boundary */
lk_status lk_pareto_sweep(const lk_network* net, int count, char** csv_out);

/* Margin trace from an operating point (solved if st is NULL) to the
 * boundary point in the base load direction. CSV: scale, sum_p, margin */
lk_status lk_margin_trace(const lk_network* net, const lk_state* st, int steps,
                          char** csv_out);

/* Active/reactive circles of one bus at an operating point.
 * CSV: bus,kind,theta,x,y ; summary: {"bus","gap","points"} */
lk_status lk_circles(const lk_network* net, const lk_state* st, int bus_id,
                     int samples, char** csv_out, char** summary_json);

/* Ground-truth region scan. grid_json:
 * {"lo": f, "hi": f, "step": f, "real_only": bool, "allow_large": bool}
 * (uniform axes). Emits region, front and singular-locus CSVs. */
lk_status lk_region_scan(const lk_network* net, const char* grid_json,
                         char** region_csv, char** front_csv, char** locus_csv);

/* Thevenin-vs-proposed margin sweep at one bus; the base load profile is
 * scaled from lo to hi in `steps` points. CSV: load, thevenin_margin,
 * proposed_margin */
lk_status lk_thevenin_sweep(const lk_network* net, int bus_id, double lo,
                            double hi, int steps, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* LOADKIT_H */
