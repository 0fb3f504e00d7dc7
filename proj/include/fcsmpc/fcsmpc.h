/*
 * fcsmpc - finite-control-set MPC toolkit, C API.
 *
 * Every entry point returns an fcsmpc_status; outputs travel through
 * pointers. Handles are opaque and freed with the matching *_free call.
 * fcsmpc_last_error() describes the most recent failure on the calling
 * thread. Matrices are row-major double arrays sized by the documented
 * dimensions; input vectors are int arrays of 0/1 entries.
 */
#ifndef FCSMPC_H
#define FCSMPC_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(FCSMPC_BUILD_SHARED)
#define FCSMPC_API __declspec(dllexport)
#else
#define FCSMPC_API __declspec(dllimport)
#endif
#else
#define FCSMPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fcsmpc_status {
  FCSMPC_OK = 0,
  FCSMPC_ERR_VALIDATION = 1,
  FCSMPC_ERR_DIMENSION = 2,
  FCSMPC_ERR_SINGULAR = 3,
  FCSMPC_ERR_UNSTABLE = 4,
  FCSMPC_ERR_INFEASIBLE = 5,
  FCSMPC_ERR_CAPACITY = 6,
  FCSMPC_ERR_IO = 7,
  FCSMPC_ERR_INTERNAL = 8
} fcsmpc_status;

typedef enum fcsmpc_norm {
  FCSMPC_NORM_TWO = 0,
  FCSMPC_NORM_ONE = 1,
  FCSMPC_NORM_INF = 2
} fcsmpc_norm;

typedef enum fcsmpc_solver {
  FCSMPC_SOLVER_EXHAUSTIVE = 0,
  FCSMPC_SOLVER_BRANCH_AND_BOUND = 1
} fcsmpc_solver;

typedef struct fcsmpc_model fcsmpc_model;
typedef struct fcsmpc_cycle fcsmpc_cycle;
typedef struct fcsmpc_controller fcsmpc_controller;
typedef struct fcsmpc_trajectory fcsmpc_trajectory;

typedef struct fcsmpc_amplifier_params {
  double bus_voltage;       /* V */
  double stage_inductance;  /* H */
  double stage_capacitance; /* F */
  double stage_resistance;  /* Ohm */
  double load_inductance;   /* H */
  double load_resistance;   /* Ohm */
} fcsmpc_amplifier_params;

FCSMPC_API const char* fcsmpc_version(void);

/* Message for the most recent error on this thread; never NULL. */
FCSMPC_API const char* fcsmpc_last_error(void);

/* Frees strings returned through char** outputs. */
FCSMPC_API void fcsmpc_string_free(char* s);

/* ---- plant models -------------------------------------------------- */

FCSMPC_API fcsmpc_status fcsmpc_model_amplifier(
    const fcsmpc_amplifier_params* params, double sampling_hz,
    fcsmpc_model** out);

FCSMPC_API fcsmpc_status fcsmpc_model_from_continuous(
    int32_t states, int32_t inputs, int32_t outputs, const double* a,
    const double* b, const double* c, double sampling_hz, fcsmpc_model** out);

FCSMPC_API fcsmpc_status fcsmpc_model_from_discrete(
    int32_t states, int32_t inputs, int32_t outputs, const double* a,
    const double* b, const double* c, double sample_period,
    fcsmpc_model** out);

FCSMPC_API void fcsmpc_model_free(fcsmpc_model* model);

FCSMPC_API fcsmpc_status fcsmpc_model_dims(const fcsmpc_model* model,
                                           int32_t* states, int32_t* inputs,
                                           int32_t* outputs);

/* Buffers sized states*states, states*inputs, outputs*states; any may be
 * NULL to skip. */
FCSMPC_API fcsmpc_status fcsmpc_model_matrices(const fcsmpc_model* model,
                                               double* a, double* b,
                                               double* c);

FCSMPC_API fcsmpc_status fcsmpc_model_sample_period(const fcsmpc_model* model,
                                                    double* sample_period);

FCSMPC_API fcsmpc_status fcsmpc_model_spectral_radius(
    const fcsmpc_model* model, double* radius);

FCSMPC_API fcsmpc_status fcsmpc_model_step(const fcsmpc_model* model,
                                           const double* x,
                                           const int32_t* u_bits,
                                           double* x_next);

FCSMPC_API fcsmpc_status fcsmpc_model_output(const fcsmpc_model* model,
                                             const double* x, double* y);

/* Operation mode 1..4 of a 2-input plant. */
FCSMPC_API fcsmpc_status fcsmpc_mode_of_input(const int32_t* u_bits,
                                              int32_t* mode);
FCSMPC_API fcsmpc_status fcsmpc_input_of_mode(int32_t mode, int32_t* u_bits);

/* ---- limit cycles --------------------------------------------------- */

/* Exhaustive optimal cycle search; budget 0 selects the default cap. */
FCSMPC_API fcsmpc_status fcsmpc_cycle_search(const fcsmpc_model* model,
                                             const double* y_ref,
                                             const double* gamma,
                                             fcsmpc_norm norm, int32_t period,
                                             uint64_t budget,
                                             fcsmpc_cycle** out);

/* bits is period x inputs, row-major. */
FCSMPC_API fcsmpc_status fcsmpc_cycle_from_inputs(const fcsmpc_model* model,
                                                  int32_t period,
                                                  const int32_t* bits,
                                                  fcsmpc_cycle** out);

FCSMPC_API fcsmpc_status fcsmpc_cycle_from_json(const char* json,
                                                fcsmpc_cycle** out);

FCSMPC_API void fcsmpc_cycle_free(fcsmpc_cycle* cycle);

FCSMPC_API fcsmpc_status fcsmpc_cycle_period(const fcsmpc_cycle* cycle,
                                             int32_t* period);
FCSMPC_API fcsmpc_status fcsmpc_cycle_index(const fcsmpc_cycle* cycle,
                                            uint64_t* index);
FCSMPC_API fcsmpc_status fcsmpc_cycle_state_at(const fcsmpc_cycle* cycle,
                                               int32_t phase, double* x);
FCSMPC_API fcsmpc_status fcsmpc_cycle_input_at(const fcsmpc_cycle* cycle,
                                               int32_t phase, int32_t* u_bits);

FCSMPC_API fcsmpc_status fcsmpc_cycle_cost(const fcsmpc_cycle* cycle,
                                           const fcsmpc_model* model,
                                           const double* y_ref,
                                           const double* gamma,
                                           fcsmpc_norm norm, double* cost);

/* ripple buffer sized to the model output count. */
FCSMPC_API fcsmpc_status fcsmpc_cycle_ripple(const fcsmpc_cycle* cycle,
                                             const fcsmpc_model* model,
                                             double* ripple);

FCSMPC_API fcsmpc_status fcsmpc_cycle_to_json(const fcsmpc_cycle* cycle,
                                              char** out);
FCSMPC_API fcsmpc_status fcsmpc_cycle_to_csv(const fcsmpc_cycle* cycle,
                                             const fcsmpc_model* model,
                                             char** out);

/* ---- terminal cost --------------------------------------------------- */

/* epsilon <= 0 selects the scale-aware default. p_out sized n*n. */
FCSMPC_API fcsmpc_status fcsmpc_terminal_cost_compute(
    const fcsmpc_model* model, const double* q, double epsilon, double* p_out,
    double* margin);

FCSMPC_API fcsmpc_status fcsmpc_terminal_cost_verify(const fcsmpc_model* model,
                                                     const double* q,
                                                     const double* p,
                                                     int32_t* valid,
                                                     double* margin);

/* ---- controllers ----------------------------------------------------- */

/* Constant-output tracking; q_weight/p_weight are outputs x outputs,
 * r_weight inputs x inputs. Bound pointers may be NULL (unconstrained). */
FCSMPC_API fcsmpc_status fcsmpc_controller_standard(
    const fcsmpc_model* model, int32_t horizon, const double* q_weight,
    const double* r_weight, const double* p_weight, const double* y_ref,
    const double* x_lower, const double* x_upper, const double* y_lower,
    const double* y_upper, fcsmpc_controller** out);

/* Limit-cycle tracking; q_weight/p_weight are states x states. */
FCSMPC_API fcsmpc_status fcsmpc_controller_cycle_tracking(
    const fcsmpc_model* model, int32_t horizon, const double* q_weight,
    const double* r_weight, const double* p_weight, const fcsmpc_cycle* cycle,
    const double* x_lower, const double* x_upper, fcsmpc_controller** out);

FCSMPC_API void fcsmpc_controller_free(fcsmpc_controller* controller);

/* u_prev_bits may be NULL for the all-zero pre-history input. */
FCSMPC_API fcsmpc_status fcsmpc_controller_step(
    const fcsmpc_controller* controller, const double* x, uint64_t k,
    const int32_t* u_prev_bits, fcsmpc_solver solver, int32_t* u_bits,
    double* cost, uint64_t* nodes_explored);

/* ---- closed-loop simulation ------------------------------------------ */

FCSMPC_API fcsmpc_status fcsmpc_simulate(const fcsmpc_controller* controller,
                                         const double* x0, int32_t steps,
                                         fcsmpc_solver solver,
                                         fcsmpc_trajectory** out);

FCSMPC_API void fcsmpc_trajectory_free(fcsmpc_trajectory* trajectory);

FCSMPC_API fcsmpc_status fcsmpc_trajectory_steps(
    const fcsmpc_trajectory* trajectory, int32_t* steps);

/* k in [0, steps] for states/outputs, [0, steps) for the rest. */
FCSMPC_API fcsmpc_status fcsmpc_trajectory_state_at(
    const fcsmpc_trajectory* trajectory, int32_t k, double* x);
FCSMPC_API fcsmpc_status fcsmpc_trajectory_output_at(
    const fcsmpc_trajectory* trajectory, int32_t k, double* y);
FCSMPC_API fcsmpc_status fcsmpc_trajectory_input_at(
    const fcsmpc_trajectory* trajectory, int32_t k, int32_t* u_bits);
FCSMPC_API fcsmpc_status fcsmpc_trajectory_cost_at(
    const fcsmpc_trajectory* trajectory, int32_t k, double* cost);
FCSMPC_API fcsmpc_status fcsmpc_trajectory_mode_at(
    const fcsmpc_trajectory* trajectory, int32_t k, int32_t* mode);
FCSMPC_API fcsmpc_status fcsmpc_trajectory_nodes_at(
    const fcsmpc_trajectory* trajectory, int32_t k, uint64_t* nodes);

FCSMPC_API fcsmpc_status fcsmpc_trajectory_to_csv(
    const fcsmpc_trajectory* trajectory, char** out);

/* Steady-state metrics as a JSON object. cycle may be NULL; window 0 selects
 * ten cycle periods. */
FCSMPC_API fcsmpc_status fcsmpc_trajectory_report_json(
    const fcsmpc_trajectory* trajectory, const fcsmpc_cycle* cycle,
    double convergence_tol, int32_t window, int32_t max_mode_period,
    char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FCSMPC_H */
