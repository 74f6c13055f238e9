// Generated table of emoji short names (CLDR-style), Spanish and English.
#include "emoji_table.hpp"

namespace varicart::detail {

const std::vector<EmojiName>& emoji_names() {
  static const std::vector<EmojiName> table = {
      {0x2600, "sol", "sun"},
      {0x2601, "nube", "cloud"},
      {0x2614, "paraguas con gotas de lluvia", "umbrella with rain drops"},
      {0x2615, "bebida caliente", "hot beverage"},
      {0x2639, "cara con el ceño fruncido", "frowning face"},
      {0x263A, "cara sonriente", "smiling face"},
      {0x26A0, "advertencia", "warning"},
      {0x26A1, "alto voltaje", "high voltage"},
      {0x26BD, "balón de fútbol", "soccer ball"},
      {0x2705, "botón de marca de verificación", "check mark button"},
      {0x270A, "puño levantado", "raised fist"},
      {0x270B, "mano levantada", "raised hand"},
      {0x270C, "mano con señal de victoria", "victory hand"},
      {0x2714, "marca de verificación", "check mark"},
      {0x2716, "multiplicación", "multiply"},
      {0x2728, "chispas", "sparkles"},
      {0x274C, "marca de cruz", "cross mark"},
      {0x2753, "signo de interrogación rojo", "red question mark"},
      {0x2757, "signo de exclamación rojo", "red exclamation mark"},
      {0x2763, "exclamación de corazón", "heart exclamation"},
      {0x2764, "corazón rojo", "red heart"},
      {0x27A1, "flecha hacia la derecha", "right arrow"},
      {0x2B05, "flecha hacia la izquierda", "left arrow"},
      {0x2B06, "flecha hacia arriba", "up arrow"},
      {0x2B07, "flecha hacia abajo", "down arrow"},
      {0x2B50, "estrella", "star"},
      {0x1F308, "arcoíris", "rainbow"},
      {0x1F30E, "globo terráqueo mostrando américa", "globe showing americas"},
      {0x1F319, "luna", "crescent moon"},
      {0x1F31E, "sol con cara", "sun with face"},
      {0x1F31F, "estrella brillante", "glowing star"},
      {0x1F334, "palmera", "palm tree"},
      {0x1F339, "rosa", "rose"},
      {0x1F381, "regalo", "wrapped gift"},
      {0x1F382, "tarta de cumpleaños", "birthday cake"},
      {0x1F389, "cañón de confeti", "party popper"},
      {0x1F38A, "bola de confeti", "confetti ball"},
      {0x1F3B5, "nota musical", "musical note"},
      {0x1F3B6, "notas musicales", "musical notes"},
      {0x1F3C6, "trofeo", "trophy"},
      {0x1F3F3, "bandera blanca", "white flag"},
      {0x1F3F4, "bandera negra", "black flag"},
      {0x1F440, "ojos", "eyes"},
      {0x1F446, "dorso de mano con índice hacia arriba", "backhand index pointing up"},
      {0x1F447, "dorso de mano con índice hacia abajo", "backhand index pointing down"},
      {0x1F448, "dorso de mano con índice a la izquierda", "backhand index pointing left"},
      {0x1F449, "dorso de mano con índice a la derecha", "backhand index pointing right"},
      {0x1F44A, "puño cerrado", "oncoming fist"},
      {0x1F44B, "mano saludando", "waving hand"},
      {0x1F44C, "señal de aprobación con la mano", "ok hand"},
      {0x1F44D, "pulgar hacia arriba", "thumbs up"},
      {0x1F44E, "pulgar hacia abajo", "thumbs down"},
      {0x1F44F, "manos aplaudiendo", "clapping hands"},
      {0x1F480, "calavera", "skull"},
      {0x1F48B, "marca de beso", "kiss mark"},
      {0x1F494, "corazón roto", "broken heart"},
      {0x1F495, "dos corazones", "two hearts"},
      {0x1F496, "corazón brillante", "sparkling heart"},
      {0x1F497, "corazón creciente", "growing heart"},
      {0x1F499, "corazón azul", "blue heart"},
      {0x1F49A, "corazón verde", "green heart"},
      {0x1F49B, "corazón amarillo", "yellow heart"},
      {0x1F49C, "corazón morado", "purple heart"},
      {0x1F49E, "corazones giratorios", "revolving hearts"},
      {0x1F4A5, "colisión", "collision"},
      {0x1F4A6, "gotas de sudor", "sweat droplets"},
      {0x1F4A8, "salir corriendo", "dashing away"},
      {0x1F4A9, "caca con ojos", "pile of poo"},
      {0x1F4AA, "bíceps flexionado", "flexed biceps"},
      {0x1F4AC, "bocadillo de diálogo", "speech balloon"},
      {0x1F4AF, "cien puntos", "hundred points"},
      {0x1F4B0, "bolsa de dinero", "money bag"},
      {0x1F4E2, "altavoz de mano", "loudspeaker"},
      {0x1F4E3, "megáfono", "megaphone"},
      {0x1F4F1, "teléfono móvil", "mobile phone"},
      {0x1F4F7, "cámara de fotos", "camera"},
      {0x1F4F8, "cámara con flash", "camera with flash"},
      {0x1F525, "fuego", "fire"},
      {0x1F600, "cara sonriendo", "grinning face"},
      {0x1F601, "cara radiante con ojos sonrientes", "beaming face with smiling eyes"},
      {0x1F602, "cara llorando de risa", "face with tears of joy"},
      {0x1F603, "cara sonriendo con ojos grandes", "grinning face with big eyes"},
      {0x1F604, "cara sonriendo con ojos sonrientes", "grinning face with smiling eyes"},
      {0x1F605, "cara sonriendo con sudor frío", "grinning face with sweat"},
      {0x1F606, "cara sonriendo con los ojos cerrados", "grinning squinting face"},
      {0x1F607, "cara sonriendo con aureola", "smiling face with halo"},
      {0x1F608, "cara sonriendo con cuernos", "smiling face with horns"},
      {0x1F609, "cara guiñando el ojo", "winking face"},
      {0x1F60A, "cara feliz con ojos sonrientes", "smiling face with smiling eyes"},
      {0x1F60B, "cara saboreando comida", "face savoring food"},
      {0x1F60C, "cara de alivio", "relieved face"},
      {0x1F60D, "cara sonriendo con ojos de corazón", "smiling face with heart eyes"},
      {0x1F60E, "cara sonriendo con gafas de sol", "smiling face with sunglasses"},
      {0x1F60F, "cara sonriendo con superioridad", "smirking face"},
      {0x1F610, "cara neutral", "neutral face"},
      {0x1F611, "cara sin expresión", "expressionless face"},
      {0x1F612, "cara de desaprobación", "unamused face"},
      {0x1F613, "cara con sudor frío", "downcast face with sweat"},
      {0x1F614, "cara desanimada", "pensive face"},
      {0x1F615, "cara de confusión", "confused face"},
      {0x1F616, "cara de frustración", "confounded face"},
      {0x1F617, "cara besando", "kissing face"},
      {0x1F618, "cara lanzando un beso", "face blowing a kiss"},
      {0x1F619, "cara besando con ojos sonrientes", "kissing face with smiling eyes"},
      {0x1F61A, "cara besando con los ojos cerrados", "kissing face with closed eyes"},
      {0x1F61B, "cara sacando la lengua", "face with tongue"},
      {0x1F61C, "cara sacando la lengua y guiñando un ojo", "winking face with tongue"},
      {0x1F61D, "cara con ojos cerrados y lengua fuera", "squinting face with tongue"},
      {0x1F61E, "cara decepcionada", "disappointed face"},
      {0x1F61F, "cara preocupada", "worried face"},
      {0x1F620, "cara enfadada", "angry face"},
      {0x1F621, "cara cabreada", "pouting face"},
      {0x1F622, "cara llorando", "crying face"},
      {0x1F623, "cara desesperada", "persevering face"},
      {0x1F624, "cara resoplando", "face with steam from nose"},
      {0x1F625, "cara triste pero aliviada", "sad but relieved face"},
      {0x1F626, "cara con el ceño fruncido y la boca abierta", "frowning face with open mouth"},
      {0x1F627, "cara angustiada", "anguished face"},
      {0x1F628, "cara asustada", "fearful face"},
      {0x1F629, "cara agotada", "weary face"},
      {0x1F62A, "cara de sueño", "sleepy face"},
      {0x1F62B, "cara cansada", "tired face"},
      {0x1F62C, "cara haciendo una mueca", "grimacing face"},
      {0x1F62D, "cara llorando fuerte", "loudly crying face"},
      {0x1F62E, "cara con la boca abierta", "face with open mouth"},
      {0x1F62F, "cara estupefacta", "hushed face"},
      {0x1F630, "cara con ansiedad y sudor", "anxious face with sweat"},
      {0x1F631, "cara gritando de miedo", "face screaming in fear"},
      {0x1F632, "cara asombrada", "astonished face"},
      {0x1F633, "cara sonrojada", "flushed face"},
      {0x1F634, "cara durmiendo", "sleeping face"},
      {0x1F635, "cara mareada", "face with crossed out eyes"},
      {0x1F636, "cara sin boca", "face without mouth"},
      {0x1F637, "cara con mascarilla médica", "face with medical mask"},
      {0x1F641, "cara con el ceño ligeramente fruncido", "slightly frowning face"},
      {0x1F642, "cara sonriendo ligeramente", "slightly smiling face"},
      {0x1F643, "cara al revés", "upside down face"},
      {0x1F644, "cara con ojos en blanco", "face with rolling eyes"},
      {0x1F645, "persona haciendo el gesto de no", "person gesturing no"},
      {0x1F648, "mono con los ojos tapados", "see no evil monkey"},
      {0x1F64A, "mono con la boca tapada", "speak no evil monkey"},
      {0x1F64C, "manos levantadas celebrando", "raising hands"},
      {0x1F64F, "manos en oración", "folded hands"},
      {0x1F6A8, "luces de policía", "police car light"},
      {0x1F6A9, "banderín triangular", "triangular flag"},
      {0x1F6AB, "prohibido", "prohibited"},
      {0x1F90D, "corazón blanco", "white heart"},
      {0x1F914, "cara pensativa", "thinking face"},
      {0x1F917, "cara con manos abrazando", "smiling face with open hands"},
      {0x1F918, "mano haciendo el signo de cuernos", "sign of the horns"},
      {0x1F919, "mano haciendo el gesto de llamar", "call me hand"},
      {0x1F91D, "apretón de manos", "handshake"},
      {0x1F91E, "dedos cruzados", "crossed fingers"},
      {0x1F91F, "gesto de te quiero", "love you gesture"},
      {0x1F921, "cara de payaso", "clown face"},
      {0x1F923, "cara revolviéndose de la risa", "rolling on the floor laughing"},
      {0x1F926, "persona con la mano en la frente", "person facepalming"},
      {0x1F92C, "cara con símbolos en la boca", "face with symbols on mouth"},
      {0x1F92E, "cara vomitando", "face vomiting"},
      {0x1F92F, "cabeza explotando", "exploding head"},
      {0x1F937, "persona encogida de hombros", "person shrugging"},
      {0x1F970, "cara sonriendo con corazones", "smiling face with hearts"},
      {0x1F972, "cara sonriente con lágrima", "smiling face with tear"},
      {0x1F973, "cara de fiesta", "partying face"},
      {0x1F974, "cara aturdida", "woozy face"},
      {0x1F97A, "cara suplicante", "pleading face"},
      {0x1F9D0, "cara con monóculo", "face with monocle"},
  };
  return table;
}

const std::vector<FlagName>& flag_names() {
  static const std::vector<FlagName> table = {
      {"AR", "argentina", "argentina"},
      {"BO", "bolivia", "bolivia"},
      {"BR", "brasil", "brazil"},
      {"CA", "canadá", "canada"},
      {"CL", "chile", "chile"},
      {"CN", "china", "china"},
      {"CO", "colombia", "colombia"},
      {"CR", "costa rica", "costa rica"},
      {"CU", "cuba", "cuba"},
      {"DE", "alemania", "germany"},
      {"DO", "república dominicana", "dominican republic"},
      {"EC", "ecuador", "ecuador"},
      {"ES", "españa", "spain"},
      {"EU", "unión europea", "european union"},
      {"FR", "francia", "france"},
      {"GB", "reino unido", "united kingdom"},
      {"GQ", "guinea ecuatorial", "equatorial guinea"},
      {"GT", "guatemala", "guatemala"},
      {"HN", "honduras", "honduras"},
      {"IT", "italia", "italy"},
      {"MX", "méxico", "mexico"},
      {"NI", "nicaragua", "nicaragua"},
      {"PA", "panamá", "panama"},
      {"PE", "perú", "peru"},
      {"PR", "puerto rico", "puerto rico"},
      {"PT", "portugal", "portugal"},
      {"PY", "paraguay", "paraguay"},
      {"RU", "rusia", "russia"},
      {"SV", "el salvador", "el salvador"},
      {"UA", "ucrania", "ukraine"},
      {"US", "estados unidos", "united states"},
      {"UY", "uruguay", "uruguay"},
      {"VE", "venezuela", "venezuela"},
  };
  return table;
}

}  // namespace varicart::detail
