#include "dosc/quadrature.hpp"

#include <limits>

#include "dosc/errors.hpp"

namespace dosc {

namespace {

// QUADPACK qk41 (20-point Gauss, 41-point Kronrod).
constexpr double kXgk41[21] = {
    .998859031588277663838315576545863, .993128599185094924786122388471320, .981507877450250259193342994720217,
    .963971927277913791267666131197277, .940822633831754753519982722212443, .912234428251325905867752441203298,
    .878276811252281976077442995113078, .839116971822218823394529061701521, .795041428837551198350638833272788,
    .746331906460150792614305070355642, .693237656334751384805490711845932, .636053680726515025452836696226286,
    .575140446819710315342946036586425, .510867001950827098004364050955251, .443593175238725103199992213492640,
    .373706088715419560672548177024927, .301627868114913004320555356858592, .227785851141645078080496195368575,
    .152605465240922675505220241022678, .076526521133497333754640409398838, 0.};
constexpr double kWgk41[21] = {
    .003073583718520531501218293246031, .008600269855642942198661787950102, .014626169256971252983787960308868,
    .020388373461266523598010231432755, .025882133604951158834505067096153, .031287306777032798958543119323801,
    .036600169758200798030557240707211, .041668873327973686263788305936895, .046434821867497674720231880926108,
    .050944573923728691932707670050345, .055195105348285994744832372419777, .059111400880639572374967220648594,
    .062653237554781168025870122174255, .065834597133618422111563556969398, .068648672928521619345623411885368,
    .071054423553444068305790361723210, .073030690332786667495189417658913, .074582875400499188986581418362488,
    .075704497684556674659542775376617, .076377867672080736705502835038061, .076600711917999656445049901530102};
constexpr double kWg20[10] = {
    .017614007139152118311861962351853, .040601429800386941331039952274932, .062672048334109063569506535187042,
    .083276741576704748724758143222046, .101930119817240435036750135480350, .118194531961518417312377377711382,
    .131688638449176626898494499748163, .142096109318382051329298325067165, .149172986472603746787828737001969,
    .152753387130725850698084331955098};

// QUADPACK qk21 (10-point Gauss, 21-point Kronrod).
constexpr double kXgk21[11] = {
    .995657163025808080735527280689003, .973906528517171720077964012084452, .930157491355708226001207180059508,
    .865063366688984510732096688423493, .780817726586416897063717578345042, .679409568299024406234327365114874,
    .562757134668604683339000099272694, .433395394129247190799265943165784, .294392862701460198131126603103866,
    .148874338981631210884826001129720, 0.};
constexpr double kWgk21[11] = {
    .011694638867371874278064396062192, .032558162307964727478818972459390, .054755896574351996031381300244580,
    .075039674810919952767043140916190, .093125454583697605535065465083366, .109387158802297641899210590325805,
    .123491976262065851077958109831074, .134709217311473325928054001771707, .142775938577060080797094273138717,
    .147739104901338491374841515972068, .149445554002916905664936468389821};
constexpr double kWg10[5] = {.066671344308688137593568809893332, .149451349150580593145776339657697,
                             .219086362515982043995534934228163, .269266719309996355091226921569469,
                             .295524224714752870173892994651338};

const GKRule kGK41{kXgk41, kWgk41, kWg20, 21};
const GKRule kGK21{kXgk21, kWgk21, kWg10, 11};

}  // namespace

const GKRule& gk41() { return kGK41; }
const GKRule& gk21() { return kGK21; }

const GKRule& gk_rule(int order) {
  if (order == 41) return kGK41;
  if (order == 21) return kGK21;
  throw Error(ErrorKind::Config, "panel_order must be 21 or 41");
}

PanelEstimate gk_panel(const GKRule& rule, const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  PanelEstimate e;
  double err_c = 0.0;
  const std::complex<double> fc = f(c, err_c);
  const int last = rule.half - 1;
  e.kronrod = rule.wgk[last] * fc;
  e.abs_mass = rule.wgk[last] * std::abs(fc);
  e.inner_err = rule.wgk[last] * err_c;
  // The centre is a Gauss node only when the Gauss rule has odd order.
  if (last % 2 == 1) e.gauss = rule.wg[last / 2] * fc;
  for (int k = 0; k < last; ++k) {
    double el = 0.0, er = 0.0;
    const double dx = h * rule.xgk[k];
    const std::complex<double> fl = f(c - dx, el), fr = f(c + dx, er);
    e.kronrod += rule.wgk[k] * (fl + fr);
    e.abs_mass += rule.wgk[k] * (std::abs(fl) + std::abs(fr));
    e.inner_err += rule.wgk[k] * (el + er);
    if (k % 2 == 1) e.gauss += rule.wg[k / 2] * (fl + fr);
  }
  e.kronrod *= h;
  e.gauss *= h;
  e.abs_mass *= h;
  e.inner_err *= h;
  return e;
}

namespace {

struct Driver {
  const GKRule& rule;
  const Integrand& f;
  const AdaptiveOptions& opt;
  const WidthCap& cap;
  double length;
  AdaptiveResult out;

  void run(double a, double b, int depth) {
    const double w = b - a;
    if (cap && depth < opt.max_depth && w > cap(a, b)) {
      const double m = 0.5 * (a + b);
      run(a, m, depth + 1);
      run(m, b, depth + 1);
      return;
    }
    const PanelEstimate e = gk_panel(rule, f, a, b);
    const double diff = std::abs(e.kronrod - e.gauss);
    const double allowed = std::max(opt.abs_tol * w / length, opt.rel_tol * e.abs_mass);
    if (diff > allowed && depth < opt.max_depth) {
      const double m = 0.5 * (a + b);
      run(a, m, depth + 1);
      run(m, b, depth + 1);
      return;
    }
    if (diff > allowed) out.converged = false;
    out.value += e.kronrod;
    out.err += diff + e.inner_err;
    out.abs_mass += e.abs_mass;
    ++out.panels;
  }
};

}  // namespace

AdaptiveResult integrate_adaptive(const GKRule& rule, const Integrand& f, double a, double b,
                                  const AdaptiveOptions& opt, const WidthCap& cap) {
  if (!(b > a)) return {};
  Driver d{rule, f, opt, cap, b - a, {}};
  d.run(a, b, 0);
  return d.out;
}

}  // namespace dosc
